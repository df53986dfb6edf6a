#pragma once

#include <span>
#include <vector>

#include "confreach/poly.hpp"

namespace confreach {

/// Axis-aligned box prod_i [lower_i, upper_i], lower_i < upper_i.
class Box {
 public:
  Box(std::vector<double> lower, std::vector<double> upper);

  int dim() const { return static_cast<int>(lower_.size()); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  double lower(int i) const { return lower_[i]; }
  double upper(int i) const { return upper_[i]; }
  double center(int i) const { return 0.5 * (lower_[i] + upper_[i]); }
  double half_width(int i) const { return 0.5 * (upper_[i] - lower_[i]); }

  double volume() const;
  bool contains(std::span<const double> z, double tol = 0.0) const;
  bool contains(const Box& inner) const;

  /// Cartesian product (this first, then other).
  Box product(const Box& other) const;

  /// Image under z -> (z - center) / half_width of `reference`.
  Box scaled_by(const Box& reference) const;

  bool operator==(const Box&) const = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// {z : g_i(z) >= 0 for all i}.
struct SemialgebraicSet {
  VarSpace space;
  std::vector<MultiPoly> inequalities;

  bool contains(std::span<const double> z, double tol = 0.0) const;
};

/// One quadratic (upper_i - z_i)(z_i - lower_i) per box dimension. The box
/// occupies variables [first_var, first_var + dim) of `space`.
SemialgebraicSet box_to_inequalities(const Box& b, VarSpace space, int first_var);

/// Convenience overload: the box dimensions are the whole x-only space.
SemialgebraicSet box_to_inequalities(const Box& b);

/// prod_i (upper_i^(a_i+1) - lower_i^(a_i+1)) / (a_i + 1).
double lebesgue_moment(const Box& b, std::span<const std::uint16_t> exponent);

/// Lebesgue moments of `b` over basis_enumerate(b.dim(), d), in basis order.
std::vector<double> moments_vector(const Box& b, int d);

/// Affine map between original coordinates z and scaled coordinates s in [-1,1]:
/// z = offset + scale * s.
struct AffineMap {
  std::vector<double> scale;
  std::vector<double> offset;

  static AffineMap to_unit(const Box& b);
  int dim() const { return static_cast<int>(scale.size()); }
  std::vector<double> to_scaled(std::span<const double> z) const;
  std::vector<double> to_original(std::span<const double> s) const;
  /// Concatenation (this block first).
  AffineMap product(const AffineMap& other) const;
  /// Jacobian determinant of s -> z.
  double jacobian() const;
};

/// Evaluation points over the state space. Lattices are row-major with the
/// last coordinate varying fastest and include the box corners.
struct Grid {
  std::vector<int> shape;                   // points per dimension; empty for scattered points
  std::vector<std::vector<double>> points;
  double cell_measure = 0.0;                // volume represented by one point

  static Grid lattice(const Box& box, const std::vector<int>& points_per_dim);
  static Grid scattered(std::vector<std::vector<double>> points, double cell_measure = 0.0);
  std::size_t size() const { return points.size(); }
  int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
  bool operator==(const Grid&) const = default;
};

}  // namespace confreach
