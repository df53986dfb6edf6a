#pragma once

#include <string>
#include <utility>
#include <vector>

#include "confreach/distribution.hpp"
#include "confreach/oracle.hpp"
#include "confreach/poly.hpp"
#include "confreach/sets.hpp"

namespace confreach {

/// F(x) = int w(x, theta) d mu_theta sampled on a grid, in original coordinates.
struct ConfidenceField {
  MultiPoly marginal;  // over x
  Grid grid;
  std::vector<double> values;
  int relaxation_degree = 0;
  double objective_value = 0.0;
};

/// `w` is over (x, theta) in original coordinates.
ConfidenceField build_confidence_field(const MultiPoly& w, const ThetaDistribution& dist, const Grid& grid,
                                       int relaxation_degree = 0, double objective_value = 0.0);

/// `w_scaled` is over normalized coordinates; the maps take them back to the
/// original ones before marginalizing.
ConfidenceField build_confidence_field(const MultiPoly& w_scaled, const ThetaDistribution& dist, const Grid& grid,
                                       const AffineMap& state_map, const AffineMap& theta_map,
                                       int relaxation_degree = 0, double objective_value = 0.0);

/// Grid points with F(x) >= alpha.
struct AlphaSet {
  double alpha = 0.0;
  Grid grid;
  std::vector<double> values;
  std::vector<bool> membership;
  /// Maximal runs of member points; only filled for 1-D lattices.
  std::vector<std::pair<double, double>> intervals;

  std::size_t count() const;
  double area() const { return static_cast<double>(count()) * grid.cell_measure; }
};

AlphaSet extract_alpha_set(const ConfidenceField& field, double alpha);

/// Rebuilds intervals from a membership mask on a 1-D lattice.
std::vector<std::pair<double, double>> member_intervals(const Grid& grid, const std::vector<bool>& membership);

struct ContainmentReport {
  double alpha = 0.0;
  double stat_margin = 0.0;
  /// Points with p_hat >= alpha + margin that the estimate leaves out.
  int violations = 0;
  std::vector<std::size_t> violating_points;
  double estimate_area = 0.0;
  double empirical_area = 0.0;  // area of {p_hat >= alpha}
  double excess_area = 0.0;     // estimate_area - empirical_area
  bool pass() const { return violations == 0; }
};

ContainmentReport containment_report(const AlphaSet& est, const EmpiricalField& emp, double alpha,
                                     double stat_margin);

/// Margin of `sigmas` binomial standard deviations at success probability alpha.
double binomial_margin(double alpha, int samples, double sigmas);

/// Header `x1,...,xn,F`.
std::string to_csv(const ConfidenceField& field);
/// Header `x1,...,xn,F,member`.
std::string to_csv(const AlphaSet& set);

/// Reads the membership column back from an alpha-set CSV.
std::vector<bool> read_alpha_membership(const std::string& csv, std::size_t expected_rows);

}  // namespace confreach
