#pragma once

#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "confreach/sdp.hpp"

namespace testsupport {

using confreach::SdpConstraint;
using confreach::SdpProblem;

// min <C, X>  s.t.  trace X = 1 with C = [[0,1],[1,0]]. Its dual is the LMI
// max y s.t. C - y I >= 0, i.e. the problem min x s.t. [[x,1],[1,x]] >= 0 with x = -y.
inline SdpProblem lmi_example() {
  SdpProblem p;
  p.blocks = {{"X", 2}};
  p.block_objective = {{0, 0, 1, 1.0}};
  SdpConstraint tr;
  tr.entries = {{0, 0, 0, 1.0}, {0, 1, 1, 1.0}};
  tr.rhs = 1.0;
  p.equalities = {tr};
  return p;
}

// min u  s.t.  X11 = u, X22 = u, X12 = 1.
inline SdpProblem free_example() {
  SdpProblem p;
  p.blocks = {{"X", 2}};
  p.free_vars = 1;
  p.free_objective = {1.0};
  SdpConstraint a, b, c;
  a.entries = {{0, 0, 0, 1.0}};
  a.free_entries = {{0, -1.0}};
  b.entries = {{0, 1, 1, 1.0}};
  b.free_entries = {{0, -1.0}};
  c.entries = {{0, 0, 1, 0.5}};
  c.rhs = 1.0;
  p.equalities = {a, b, c};
  return p;
}

// Strictly feasible by construction: b = A(X0) + B u0, C = Z0 + A^T y0, c_u = B^T y0.
inline SdpProblem random_feasible(std::uint64_t seed, std::vector<int> sizes, int m, int nf) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  auto spd = [&](int n) {
    Eigen::MatrixXd r(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r(i, j) = g(rng);
    return Eigen::MatrixXd(r * r.transpose() + Eigen::MatrixXd::Identity(n, n));
  };
  SdpProblem p;
  std::vector<Eigen::MatrixXd> X0, Z0;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    p.blocks.push_back({"B" + std::to_string(j), sizes[j]});
    X0.push_back(spd(sizes[j]));
    Z0.push_back(spd(sizes[j]));
  }
  p.free_vars = nf;
  Eigen::VectorXd y0(m), u0(nf);
  for (int i = 0; i < m; ++i) y0(i) = g(rng);
  for (int k = 0; k < nf; ++k) u0(k) = g(rng);
  std::vector<Eigen::MatrixXd> C = Z0;
  p.free_objective.assign(nf, 0.0);
  for (int i = 0; i < m; ++i) {
    SdpConstraint con;
    double rhs = 0.0;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      for (int r = 0; r < sizes[j]; ++r) {
        for (int c = r; c < sizes[j]; ++c) {
          if (rng() % 3 != 0) continue;
          const double v = g(rng);
          con.entries.push_back({static_cast<int>(j), r, c, v});
          const double w = r == c ? 1.0 : 2.0;
          rhs += w * v * X0[j](r, c);
          C[j](r, c) += y0(i) * v;
          if (r != c) C[j](c, r) += y0(i) * v;
        }
      }
    }
    for (int k = 0; k < nf; ++k) {
      if ((i + k) % 2 == 0) {
        const double v = g(rng);
        con.free_entries.push_back({k, v});
        rhs += v * u0(k);
        p.free_objective[k] += v * y0(i);
      }
    }
    con.rhs = rhs;
    p.equalities.push_back(con);
  }
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    for (int r = 0; r < sizes[j]; ++r)
      for (int c = r; c < sizes[j]; ++c) p.block_objective.push_back({static_cast<int>(j), r, c, C[j](r, c)});
  }
  return p;
}

}  // namespace testsupport
