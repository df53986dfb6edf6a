#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "confreach/poly.hpp"
#include "confreach/sdp.hpp"
#include "confreach/sets.hpp"

namespace confreach {

/// Polynomial system xdot = f(t, x, theta), thetadot = 0, on [0, T] x X x Theta with
/// target set X_T at the horizon.
struct ProblemSpec {
  std::vector<MultiPoly> dynamics;  // over VarSpace::txtheta(nx, ntheta)
  double horizon = 1.0;
  Box state_box;
  Box theta_box;
  Box target_box;

  int nx() const { return state_box.dim(); }
  int ntheta() const { return theta_box.dim(); }
  VarSpace flow_space() const { return VarSpace::txtheta(nx(), ntheta()); }
  VarSpace initial_space() const { return VarSpace::xtheta(nx(), ntheta()); }

  /// Throws std::invalid_argument on arity mismatch, bad horizon or X_T not in X.
  void validate() const;
};

/// The problem in normalized coordinates: X and Theta mapped to [-1,1], time to [0,1].
struct ScaledProblem {
  std::vector<MultiPoly> dynamics;  // dy/dtau
  Box target{std::vector<double>{-1.0}, std::vector<double>{1.0}};  // X_T, scaled
  AffineMap state_map;              // x = offset + scale * y
  AffineMap theta_map;
  double horizon = 1.0;
};

ScaledProblem scale_problem(const ProblemSpec& spec);

/// One Putinar-form constraint group: p = sigma0 + sum_i sigma_i g_i.
struct ConstraintGroup {
  std::string label;
  VarSpace space;
  int first_row = 0;
  int row_count = 0;
  std::vector<int> blocks;
  MonomialBasis rows;  // monomial of each equality row
};

struct Relaxation {
  int degree = 0;
  int v_degree = 0;
  SdpProblem sdp;
  VarSpace v_space;
  VarSpace w_space;
  MonomialBasis v_basis;  // scaled coordinates
  MonomialBasis w_basis;
  int v_offset = 0;  // free-variable index of the first v coefficient
  int w_offset = 0;
  std::vector<ConstraintGroup> groups;  // c1..c4
  ScaledProblem scaled;
  /// Factor converting the scaled objective into original units (Jacobian of X x Theta).
  double objective_scale = 1.0;
};

/// Degree-d sum-of-squares restriction of the dual LP, in normalized coordinates.
/// Groups: (c1) -L v on [0,T]xXxTheta, (c2) w on XxTheta, (c3) w - v(0) - 1 on
/// XxTheta, (c4) v(T) on X_T x Theta.
Relaxation assemble_dual_relaxation(const ProblemSpec& spec, int degree);

/// Decision polynomials recovered from a solution.
struct Certificate {
  MultiPoly v;  // original coordinates, over (t, x, theta)
  MultiPoly w;  // original coordinates, over (x, theta)
  MultiPoly v_scaled;
  MultiPoly w_scaled;
  double objective = 0.0;       // <lambda_x (x) lambda_theta, w> in original units
  double dual_objective = 0.0;  // matching bound from the moment side
};

Certificate extract_certificate(const Relaxation& relax, const SdpSolution& sol);

/// Dual values of a constraint group keyed by row monomial: the truncated
/// moments of the measure paired with that group.
std::vector<double> group_moments(const Relaxation& relax, const SdpSolution& sol, int group);

struct RelaxationResult {
  Relaxation relaxation;
  SdpSolution solution;
  Certificate certificate;
};

RelaxationResult solve_relaxation(const ProblemSpec& spec, int degree, const SdpOptions& opts = {});

/// Pointwise sampling check of the four dual inequalities.
struct FeasibilityReport {
  static constexpr int kGroups = 4;
  std::array<double, kGroups> min_value{};      // smallest sampled value of each nonnegative expression
  std::array<double, kGroups> max_violation{};  // max(0, -min_value)
  int samples = 0;
  bool pass = false;
};

FeasibilityReport feasibility_report(const ProblemSpec& spec, const MultiPoly& v, const MultiPoly& w,
                                     int sample_count, double tol, std::uint64_t seed = 1);

}  // namespace confreach
