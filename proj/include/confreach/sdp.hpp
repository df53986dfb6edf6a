#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace confreach {

// Conic program in equality form with free variables:
//
//   primal   min  <C, X> + c_u . u
//            s.t. <A_i, X> + (B u)_i = b_i,   X = diag(X_1..X_k) PSD,  u free
//
//   dual     max  b . y
//            s.t. Z = C - sum_i y_i A_i PSD,   B^T y = c_u
//
// Matrices are symmetric and given by upper-triangular entries (row <= col);
// an off-diagonal entry stands for both (row, col) and (col, row).

struct SdpEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct SdpConstraint {
  std::vector<SdpEntry> entries;
  std::vector<std::pair<int, double>> free_entries;
  double rhs = 0.0;
};

struct PsdBlock {
  std::string label;
  int size = 0;
};

struct SdpProblem {
  std::vector<PsdBlock> blocks;
  int free_vars = 0;
  std::vector<SdpConstraint> equalities;
  std::vector<double> free_objective;     // c_u, length free_vars
  std::vector<SdpEntry> block_objective;  // C

  /// Throws std::invalid_argument when an entry references a missing block
  /// entry or free variable.
  void validate() const;
};

enum class SdpStatus { optimal, max_iterations, infeasible_suspected, numerical_failure };

const char* to_string(SdpStatus s);

struct SdpOptions {
  double tol = 1e-7;
  int max_iter = 200;
  double step_fraction = 0.98;
  bool verbose = false;
};

struct SdpSolution {
  std::vector<Eigen::MatrixXd> block_matrices;  // X
  std::vector<Eigen::MatrixXd> dual_slacks;     // Z
  std::vector<double> free_values;              // u
  std::vector<double> dual_values;              // y
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  /// Relative duality gap |p - d| / (1 + |p| + |d|).
  double gap = 0.0;
  double primal_infeasibility = 0.0;  // relative
  double dual_infeasibility = 0.0;    // relative
  int iterations = 0;
  SdpStatus status = SdpStatus::numerical_failure;
};

/// Primal-dual interior-point method (Nesterov-Todd direction, Mehrotra
/// predictor-corrector) from a scaled-identity infeasible start.
SdpSolution solve(const SdpProblem& prob, const SdpOptions& opts = {});

struct KktReport {
  double primal_residual = 0.0;   // ||b - A(X) - B u||
  double dual_residual = 0.0;     // ||(C - A^T y - Z, c_u - B^T y)||
  double complementarity = 0.0;   // sum_j <X_j, Z_j>
  double duality_gap = 0.0;       // |<C,X> + c_u.u - b.y|
  double min_eig_primal = 0.0;
  double min_eig_dual = 0.0;
  bool pass = false;
};

/// Residuals are absolute; `pass` compares them relative to the data norms.
KktReport check_kkt(const SdpProblem& prob, const SdpSolution& sol, double tol);

/// Sparse SDPA text. Constraint i becomes SDPA matrix F_i = A_i, the objective
/// vector is b and F_0 = -C, so the SDPA dual is our primal. Free variables
/// are split u = u+ - u- into a trailing diagonal block of size 2 * free_vars.
std::string export_standard_form(const SdpProblem& prob);

}  // namespace confreach
