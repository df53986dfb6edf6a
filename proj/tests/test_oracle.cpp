#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "confreach/oracle.hpp"
#include "support.hpp"

using namespace confreach;

namespace {

const VarSpace kFlow = VarSpace::txtheta(1, 1);

ProblemSpec make(const char* f, double lo = -2.0, double hi = 2.0) {
  return ProblemSpec{{parse_poly(f, kFlow)}, 1.0, Box({lo}, {hi}), Box({-1.0}, {1.0}), Box({-0.25}, {0.25})};
}

}  // namespace

TEST_CASE("RK4 examples") {
  {
    const std::array<double, 1> x0{0.0}, th{0.5};
    const auto tr = integrate_rk4(make("theta"), x0, th, 7);
    CHECK(tr.states.back()[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.times.back() == 1.0);
    CHECK(tr.times.size() == 8);
    CHECK(tr.states.size() == tr.times.size());
  }
  {
    const std::array<double, 1> x0{1.0}, th{0.0};
    const auto tr = integrate_rk4(make("-x"), x0, th, 1000);
    CHECK(std::abs(tr.states.back()[0] - std::exp(-1.0)) <= 1e-10);
    CHECK_FALSE(tr.exited_domain);
  }
  {
    const std::array<double, 1> x0{0.3}, th{0.9};
    for (int steps : {1, 3, 50}) CHECK(integrate_rk4(make("0"), x0, th, steps).states.back()[0] == 0.3);
  }
  const std::array<double, 1> x0{0.0}, th{0.0};
  CHECK_THROWS_AS(integrate_rk4(make("theta"), x0, th, 0), std::invalid_argument);
}

TEST_CASE("RK4 converges at fourth order") {
  const std::array<double, 1> x0{1.5}, th{0.0};
  const auto spec = make("-x");
  std::vector<double> err;
  for (int steps : {5, 10, 20, 40}) {
    err.push_back(std::abs(integrate_rk4(spec, x0, th, steps).states.back()[0] - 1.5 * std::exp(-1.0)));
  }
  for (std::size_t k = 1; k < err.size(); ++k) {
    const double ratio = err[k - 1] / err[k];
    CAPTURE(ratio);
    CHECK(ratio > 14.0);
    CHECK(ratio < 18.0);
  }
}

TEST_CASE("exit and blow-up flags") {
  const std::array<double, 1> th{1.0};
  {
    const std::array<double, 1> x0{1.8};
    const auto tr = integrate_rk4(make("theta"), x0, th, 100);
    CHECK(tr.exited_domain);
    CHECK_FALSE(tr.reaches());
  }
  {
    // x(t) = 1.9 + t - 2 t^2 peaks above 2 and ends at 0.9
    const std::array<double, 1> x0{1.9};
    const auto spec = ProblemSpec{{parse_poly("theta - 4*t", kFlow)}, 1.0, Box({-2.0}, {2.0}), Box({-1.0}, {1.0}),
                                  Box({-0.25}, {1.0})};
    const auto tr = integrate_rk4(spec, x0, std::array<double, 1>{1.0}, 100);
    CHECK(tr.states.back()[0] == doctest::Approx(0.9));
    CHECK(tr.terminal_in_target);
    CHECK(tr.exited_domain);
    CHECK_FALSE(tr.reaches());
  }
  {
    const std::array<double, 1> x0{1e100};
    const auto spec = ProblemSpec{{parse_poly("x^2", kFlow)}, 1.0, Box({-1e300}, {1e300}), Box({-1.0}, {1.0}),
                                  Box({-0.25}, {0.25})};
    const auto tr = integrate_rk4(spec, x0, th, 4);
    CHECK(tr.blew_up);
    CHECK(tr.states.size() == 5);
    CHECK(std::isnan(tr.states.back()[0]));
    CHECK(tr.times.back() == 1.0);
  }
}

TEST_CASE("occupation integrals") {
  const std::array<double, 1> x0{0.0}, th{1.0};
  const auto tr = integrate_rk4(make("theta"), x0, th, 1000);
  CHECK(occupation_integral(tr, parse_poly("1", kFlow)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(occupation_integral(tr, parse_poly("t", kFlow)) - 0.5) <= 1e-12);
  CHECK(std::abs(occupation_integral(tr, parse_poly("x", kFlow)) - 0.5) <= 1e-6);
  CHECK_THROWS_AS(occupation_integral(tr, parse_poly("x", VarSpace::xtheta(1, 1))), std::invalid_argument);
}

TEST_CASE("Liouville identity examples") {
  const std::array<double, 1> x0{0.3}, th{-0.4};
  const auto spec = make("theta");
  const auto tr = integrate_rk4(spec, x0, th, 1000);
  CHECK(check_liouville_identity(tr, parse_poly("2.5", kFlow), spec) == 0.0);
  CHECK(check_liouville_identity(tr, parse_poly("t", kFlow), spec) <= 1e-12);
}

TEST_CASE("Liouville residual matches the trapezoid error term") {
  // Along a trajectory d/dt (L v) = L(L v), so the leading quadrature error is
  // h^2/12 * |L^2 v(T) - L^2 v(0)|. On x' = theta the RK4 states are exact.
  const auto spec = make("theta");
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ux(-2, 2), ut(-1, 1);
  for (int k = 0; k < 10; ++k) {
    const auto v = testsupport::random_poly(rng, kFlow, 4, 8);
    const auto l2 = lie_derivative(lie_derivative(v, spec.dynamics), spec.dynamics);
    const std::array<double, 1> a{ux(rng)}, b{ut(rng)};
    const int steps = 1000;
    const auto tr = integrate_rk4(spec, a, b, steps);
    const std::array<double, 3> z0{0.0, a[0], b[0]}, zT{1.0, tr.states.back()[0], b[0]};
    const double h = 1.0 / steps;
    const double predicted = h * h / 12.0 * std::abs(l2.evaluate(zT) - l2.evaluate(z0));
    const double r = check_liouville_identity(tr, v, spec);
    CAPTURE(k);
    CHECK(std::abs(r - predicted) <= 1e-3 * predicted + 1e-11);
  }
}

TEST_CASE("Liouville residual decays like steps^-2") {
  const auto spec = make("-x + 0.5*theta");
  const auto v = parse_poly("x^3 + t*x*theta - t^2", kFlow);
  const std::array<double, 1> x0{0.8}, th{0.6};
  double prev = check_liouville_identity(integrate_rk4(spec, x0, th, 25), v, spec);
  for (int steps : {50, 100, 200}) {
    const double r = check_liouville_identity(integrate_rk4(spec, x0, th, steps), v, spec);
    CAPTURE(steps);
    CHECK(prev / r == doctest::Approx(4.0).epsilon(0.1));
    prev = r;
  }
}

TEST_CASE("empirical confidence on the drift benchmark") {
  const auto spec = make("theta");
  const auto dist = ThetaDistribution::uniform(Box({-1.0}, {1.0}));
  const auto grid = Grid::scattered({{0.0}, {1.0}, {2.0}});
  const int n = 4000;
  const auto f = empirical_confidence(spec, dist, grid, n, 42, {100, 1});
  const double sigma = std::sqrt(0.25 * 0.75 / n);
  CHECK(std::abs(f.values[0] - 0.25) <= 3 * sigma);
  CHECK(std::abs(f.values[1] - 0.125) <= 3 * std::sqrt(0.125 * 0.875 / n));
  CHECK(f.values[2] == 0.0);
  CHECK(f.half_width[0] == doctest::Approx(1.96 * std::sqrt(f.values[0] * (1 - f.values[0]) / n)));
  CHECK(f.samples_per_point == n);
  CHECK(f.exited_fraction[0] == 0.0);
  CHECK(f.exited_fraction[2] > 0.4);
  for (double p : f.values) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("empirical confidence is reproducible and schedule-independent") {
  const auto spec = make("theta - 0.2*x");
  const auto dist = ThetaDistribution::uniform(Box({-1.0}, {1.0}));
  const auto grid = Grid::lattice(Box({-2.0}, {2.0}), {41});
  const auto a = empirical_confidence(spec, dist, grid, 300, 5, {200, 1});
  const auto b = empirical_confidence(spec, dist, grid, 300, 5, {200, 4});
  const auto c = empirical_confidence(spec, dist, grid, 300, 6, {200, 1});
  CHECK(a.values == b.values);
  CHECK(to_csv(a) == to_csv(b));
  CHECK(a.values != c.values);
}

TEST_CASE("empirical superlevel sets shrink as alpha grows") {
  const auto spec = make("theta");
  const auto dist = ThetaDistribution::uniform(Box({-1.0}, {1.0}));
  const auto grid = Grid::lattice(Box({-2.0}, {2.0}), {81});
  const auto f = empirical_confidence(spec, dist, grid, 500, 1, {10, 1});
  for (double a1 : {0.05, 0.1, 0.2}) {
    for (double a2 : {0.15, 0.22, 0.3}) {
      if (a2 <= a1) continue;
      for (double p : f.values) {
        if (p >= a2) CHECK(p >= a1);
      }
    }
  }
}

TEST_CASE("sampling kinds") {
  const auto spec = make("theta");
  const auto grid = Grid::scattered({{0.0}});
  const auto atom = ThetaDistribution::atoms({{{0.1}, 1.0}});
  CHECK(empirical_confidence(spec, atom, grid, 10, 1).values[0] == 1.0);
  const auto mix = ThetaDistribution::atoms({{{0.1}, 0.5}, {{0.9}, 0.5}});
  const double p = empirical_confidence(spec, mix, grid, 4000, 1, {10, 1}).values[0];
  CHECK(std::abs(p - 0.5) <= 3 * std::sqrt(0.25 / 4000));
  const auto table = ThetaDistribution::table(1, 0, {{{0}, 1.0}});
  CHECK_THROWS_AS(empirical_confidence(spec, table, grid, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(empirical_confidence(spec, atom, grid, 0, 1), std::invalid_argument);
  auto rng = make_stream(1, 2);
  for (int k = 0; k < 1000; ++k) {
    const double u = uniform01(rng);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("empirical field CSV layout") {
  const auto spec = make("theta");
  const auto dist = ThetaDistribution::uniform(Box({-1.0}, {1.0}));
  const auto f = empirical_confidence(spec, dist, Grid::scattered({{2.0}, {0.5}}), 10, 1, {10, 1});
  const auto csv = to_csv(f);
  CHECK(csv.rfind("x1,p_hat,half_width,n_samples,exited_domain_fraction\n2,0,0,10,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
