#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <Eigen/Dense>

#include "confreach/sdp.hpp"
#include "sdp_examples.hpp"

using namespace confreach;
using testsupport::free_example;
using testsupport::lmi_example;
using testsupport::random_feasible;

namespace {

// Test-only reader for the sparse SDPA text written by export_standard_form.
SdpProblem parse_sdpa(const std::string& text) {
  std::istringstream in(text);
  int m = 0, nb = 0;
  in >> m >> nb;
  std::vector<int> sizes(nb);
  for (auto& s : sizes) in >> s;
  std::vector<double> c(m);
  for (auto& v : c) in >> v;
  SdpProblem p;
  int nf = 0;
  for (int s : sizes) {
    if (s < 0) {
      nf = -s / 2;
    } else {
      p.blocks.push_back({"", s});
    }
  }
  const int free_block = static_cast<int>(p.blocks.size());
  p.free_vars = nf;
  p.free_objective.assign(nf, 0.0);
  p.equalities.resize(m);
  for (int i = 0; i < m; ++i) p.equalities[i].rhs = c[i];
  int mat, blk, r, col;
  double v;
  while (in >> mat >> blk >> r >> col >> v) {
    --blk;
    --r;
    --col;
    if (blk == free_block) {
      if (r >= nf) continue;  // the u- half mirrors u+
      if (mat == 0) {
        p.free_objective[r] = -v;
      } else {
        p.equalities[mat - 1].free_entries.push_back({r, v});
      }
    } else if (mat == 0) {
      p.block_objective.push_back({blk, r, col, -v});
    } else {
      p.equalities[mat - 1].entries.push_back({blk, r, col, v});
    }
  }
  return p;
}

using Canon = std::map<std::tuple<int, int, int, int>, double>;

Canon canonical(const SdpProblem& p) {
  Canon out;
  auto add = [&](int k, const SdpEntry& e) { out[{k, e.block, e.row, e.col}] += e.value; };
  for (const auto& e : p.block_objective) add(-1, e);
  for (std::size_t i = 0; i < p.equalities.size(); ++i) {
    for (const auto& e : p.equalities[i].entries) add(static_cast<int>(i), e);
    for (const auto& [j, v] : p.equalities[i].free_entries) out[{static_cast<int>(i), -1, j, 0}] += v;
    out[{static_cast<int>(i), -2, 0, 0}] += p.equalities[i].rhs;
  }
  for (int j = 0; j < p.free_vars; ++j) out[{-1, -1, j, 0}] += p.free_objective[j];
  for (auto it = out.begin(); it != out.end();) it = it->second == 0.0 ? out.erase(it) : std::next(it);
  return out;
}

}  // namespace

TEST_CASE("LMI micro problem has x* = 1") {
  const auto p = lmi_example();
  const auto sol = solve(p);
  REQUIRE(sol.status == SdpStatus::optimal);
  CHECK(std::abs(-sol.dual_values[0] - 1.0) <= 1e-7);
  CHECK(std::abs(sol.primal_objective + 1.0) <= 1e-7);
  const auto kkt = check_kkt(p, sol, 1e-7);
  CHECK(kkt.pass);
  CHECK(kkt.primal_residual <= 1e-8);
  CHECK(kkt.dual_residual <= 1e-8);
  CHECK(std::abs(kkt.complementarity) <= 1e-8);
}

TEST_CASE("free-variable micro problem has u* = 1") {
  const auto p = free_example();
  const auto sol = solve(p);
  REQUIRE(sol.status == SdpStatus::optimal);
  CHECK(std::abs(sol.free_values[0] - 1.0) <= 1e-7);
  CHECK(std::abs(sol.primal_objective - 1.0) <= 1e-7);
  CHECK(check_kkt(p, sol, 1e-7).pass);
}

TEST_CASE("min trace with a pinned corner") {
  SdpProblem p;
  p.blocks = {{"X", 3}};
  p.block_objective = {{0, 0, 0, 1.0}, {0, 1, 1, 1.0}, {0, 2, 2, 1.0}};
  SdpConstraint c;
  c.entries = {{0, 0, 0, 1.0}};
  c.rhs = 1.0;
  p.equalities = {c};
  const auto sol = solve(p);
  REQUIRE(sol.status == SdpStatus::optimal);
  CHECK(std::abs(sol.primal_objective - 1.0) <= 1e-7);
  Eigen::MatrixXd e1 = Eigen::MatrixXd::Zero(3, 3);
  e1(0, 0) = 1.0;
  CHECK((sol.block_matrices[0] - e1).norm() <= 1e-6);
}

TEST_CASE("random strictly feasible three-block problems pass KKT") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const auto p = random_feasible(seed, {3, 4, 2}, 12, 2);
    const auto sol = solve(p);
    CAPTURE(seed);
    REQUIRE(sol.status == SdpStatus::optimal);
    const auto kkt = check_kkt(p, sol, 1e-7);
    CHECK(kkt.pass);
    CHECK(kkt.min_eig_primal >= -1e-7);
    CHECK(kkt.min_eig_dual >= -1e-7);
    CHECK(sol.gap <= 1e-7);
    CHECK(sol.primal_objective >= sol.dual_objective - 1e-7 * (1 + std::abs(sol.primal_objective)));
  }
}

TEST_CASE("KKT residual checks react to perturbations") {
  const auto p = lmi_example();
  auto sol = solve(p);
  sol.dual_values[0] += 0.1;
  CHECK(check_kkt(p, sol, 1e-7).dual_residual >= 0.09);
  CHECK_FALSE(check_kkt(p, sol, 1e-7).pass);

  const auto q = free_example();
  SdpSolution zero;
  zero.block_matrices = {Eigen::MatrixXd::Zero(2, 2)};
  zero.dual_slacks = {Eigen::MatrixXd::Zero(2, 2)};
  zero.free_values = {0.0};
  zero.dual_values = {0.0, 0.0, 0.0};
  CHECK(check_kkt(q, zero, 1e-7).primal_residual == doctest::Approx(1.0));  // ||b|| = 1
  CHECK_THROWS_AS(check_kkt(p, zero, 1e-7), std::invalid_argument);
}

TEST_CASE("solver is deterministic") {
  const auto p = random_feasible(9, {4, 3, 3}, 15, 3);
  const auto a = solve(p), b = solve(p);
  CHECK(a.iterations == b.iterations);
  CHECK(a.free_values == b.free_values);
  CHECK(a.dual_values == b.dual_values);
  for (std::size_t j = 0; j < a.block_matrices.size(); ++j) CHECK(a.block_matrices[j] == b.block_matrices[j]);
}

TEST_CASE("an infeasible problem is not reported optimal") {
  SdpProblem p;
  p.blocks = {{"X", 1}};
  SdpConstraint c;
  c.entries = {{0, 0, 0, 1.0}};
  c.rhs = -1.0;
  p.equalities = {c};
  const auto sol = solve(p);
  CHECK(sol.status != SdpStatus::optimal);
}

TEST_CASE("problem validation") {
  auto p = lmi_example();
  p.equalities[0].entries.push_back({0, 2, 2, 1.0});
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  auto q = free_example();
  q.equalities[0].free_entries.push_back({3, 1.0});
  CHECK_THROWS_AS(solve(q), std::invalid_argument);
  SdpProblem empty;
  empty.blocks = {{"X", 1}};
  CHECK_THROWS_AS(solve(empty), std::invalid_argument);
}

TEST_CASE("export of the LMI example") {
  const std::string text = export_standard_form(lmi_example());
  CHECK(text == "1\n1\n2\n1\n0 1 1 2 -1\n1 1 1 1 1\n1 1 2 2 1\n");
  int entry_lines = 0;
  std::istringstream in(text);
  std::string line;
  for (int i = 0; i < 4; ++i) std::getline(in, line);
  while (std::getline(in, line)) ++entry_lines;
  CHECK(entry_lines == 3);
}

TEST_CASE("export with a zero objective has an all-zero objective line") {
  auto p = free_example();
  for (auto& c : p.equalities) c.rhs = 0.0;
  const std::string text = export_standard_form(p);
  std::istringstream in(text);
  std::string l1, l2, l3, l4;
  std::getline(in, l1);
  std::getline(in, l2);
  std::getline(in, l3);
  std::getline(in, l4);
  CHECK(l1 == "3");
  CHECK(l2 == "2");
  CHECK(l3 == "2 -2");
  CHECK(l4 == "0 0 0");
}

TEST_CASE("export round-trips and is byte-deterministic") {
  for (std::uint64_t seed : {3u, 7u}) {
    const auto p = random_feasible(seed, {3, 2, 4}, 10, 2);
    const auto text = export_standard_form(p);
    CHECK(text == export_standard_form(p));
    const auto back = parse_sdpa(text);
    CHECK(back.blocks.size() == p.blocks.size());
    CHECK(back.free_vars == p.free_vars);
    CHECK(canonical(back) == canonical(p));
  }
  const auto f = free_example();
  CHECK(canonical(parse_sdpa(export_standard_form(f))) == canonical(f));
}
