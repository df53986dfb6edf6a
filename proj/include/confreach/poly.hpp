#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace confreach {

/// Exponent tuple over the joint variable space, ordered (t | x1..xn | theta1..thetam).
using Exponent = std::vector<std::uint16_t>;

/// Degree reported for the zero polynomial.
inline constexpr int kZeroDegree = -1;

int total_degree(const Exponent& e);

/// Graded lexicographic order: total degree first, then lexicographic on the tuple.
struct GradedLexLess {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

/// Declared variable blocks of a polynomial. Variables are laid out as
/// t (if present), then x1..xn, then theta1..thetam.
struct VarSpace {
  int nt = 0;
  int nx = 0;
  int ntheta = 0;

  int total() const { return nt + nx + ntheta; }
  int t_index() const { return 0; }
  int x_index(int i) const { return nt + i; }
  int theta_index(int j) const { return nt + nx + j; }
  std::string name(int var) const;

  bool operator==(const VarSpace&) const = default;

  static VarSpace txtheta(int nx, int ntheta) { return {1, nx, ntheta}; }
  static VarSpace xtheta(int nx, int ntheta) { return {0, nx, ntheta}; }
  static VarSpace x_only(int nx) { return {0, nx, 0}; }
};

using TermMap = std::map<Exponent, double, GradedLexLess>;

/// Sparse multivariate polynomial with real coefficients.
///
/// Terms are kept in graded-lex order with no stored zero coefficient. Algebra
/// prunes only exact zeros; `cleaned` is the explicit tolerance-based prune.
class MultiPoly {
 public:
  explicit MultiPoly(VarSpace space = {});

  /// Sums duplicate exponents, validates tuple lengths, drops exact zeros.
  MultiPoly(VarSpace space, const std::vector<std::pair<Exponent, double>>& terms);

  static MultiPoly constant(VarSpace space, double c);
  static MultiPoly variable(VarSpace space, int var);
  static MultiPoly monomial(VarSpace space, Exponent e, double c = 1.0);

  const VarSpace& space() const { return space_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  int degree() const;
  /// Maximum total degree restricted to variables [first, first + count).
  int degree_in(int first, int count) const;
  double coefficient(const Exponent& e) const;

  double evaluate(std::span<const double> point) const;

  MultiPoly operator-() const;
  MultiPoly operator*(double s) const;
  friend MultiPoly operator*(double s, const MultiPoly& p) { return p * s; }
  friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  bool operator==(const MultiPoly& other) const = default;

  MultiPoly derivative(int var) const;

  /// Replaces variable `var` by the constant `value`; the variable space is kept.
  MultiPoly substitute(int var, double value) const;

  /// Replaces z_i by offset_i + scale_i * z_i for every variable.
  MultiPoly affine_substitute(std::span<const double> scale, std::span<const double> offset) const;

  /// Re-expresses the polynomial in `target`; variables are matched by block and
  /// position. Fails if a nonzero exponent has no slot in `target`.
  MultiPoly reembed(VarSpace target) const;

  /// Drops terms with |coefficient| <= tol.
  MultiPoly cleaned(double tol = 1e-12) const;

  double max_abs_coefficient() const;

 private:
  void require_same_space(const MultiPoly& other) const;
  void accumulate(const Exponent& e, double c);

  VarSpace space_;
  TermMap terms_;
};

MultiPoly poly_add(const MultiPoly& a, const MultiPoly& b);
MultiPoly poly_mul(const MultiPoly& a, const MultiPoly& b);
MultiPoly partial_derivative(const MultiPoly& p, int var_index);
double evaluate(const MultiPoly& p, std::span<const double> point);

/// dv/dt + sum_i dv/dx_i * f_i. The parameters are constant along the flow,
/// so only the state components of the field are supplied.
MultiPoly lie_derivative(const MultiPoly& v, std::span<const MultiPoly> field);

/// All monomials of total degree <= max_degree in graded-lex order.
struct MonomialBasis {
  int nvars = 0;
  int max_degree = 0;
  std::vector<Exponent> exponents;

  std::size_t size() const { return exponents.size(); }
  /// Position of `e` in the basis, or -1.
  long index_of(const Exponent& e) const;
};

MonomialBasis basis_enumerate(int nvars, int max_degree);

/// Number of monomials of degree <= d in n variables, C(n + d, d).
std::size_t basis_size(int nvars, int max_degree);

/// Flattened evaluator for hot loops (trajectory integration). Produces the
/// same value as MultiPoly::evaluate.
class PolyEvaluator {
 public:
  PolyEvaluator() = default;
  explicit PolyEvaluator(const MultiPoly& p);
  double operator()(std::span<const double> point) const;

 private:
  int nvars_ = 0;
  std::vector<double> coeffs_;
  // Per term: (variable, power) pairs for the nonzero exponents.
  std::vector<std::uint32_t> offsets_;
  std::vector<std::pair<std::uint16_t, std::uint16_t>> factors_;
};

// Text format:  coeff * t^a * x1^b * theta1^c  + ...
// Factors may be separated by '*' or whitespace; '^1' and the coefficient are
// optional. `x` and `theta` are accepted for single-variable blocks.

/// Throws std::invalid_argument naming the offending term.
MultiPoly parse_poly(std::string_view text, VarSpace space);

/// One term per line, round-trips exactly through parse_poly.
std::string format_poly(const MultiPoly& p);

/// Compact single-line rendering for messages.
std::string to_string(const MultiPoly& p);

}  // namespace confreach
