#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "confreach/poly.hpp"

namespace testsupport {

// Integer coefficients keep sums and products exact in double precision.
inline confreach::MultiPoly random_poly(std::mt19937_64& rng, confreach::VarSpace space, int max_degree, int terms) {
  std::uniform_int_distribution<int> coeff(-5, 5);
  std::uniform_int_distribution<int> var(0, space.total() - 1);
  std::uniform_int_distribution<int> deg(0, max_degree);
  confreach::MultiPoly p(space);
  for (int k = 0; k < terms; ++k) {
    confreach::Exponent e(space.total(), 0);
    const int d = deg(rng);
    for (int j = 0; j < d; ++j) ++e[var(rng)];
    p = p + confreach::MultiPoly::monomial(space, e, coeff(rng));
  }
  return p;
}

namespace detail {
inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Adaptive Simpson quadrature on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace testsupport
