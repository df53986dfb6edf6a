#include "confreach/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>

namespace confreach {

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::max_iterations: return "max_iterations";
    case SdpStatus::infeasible_suspected: return "infeasible_suspected";
    case SdpStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

void SdpProblem::validate() const {
  for (const auto& b : blocks) {
    if (b.size < 1) throw std::invalid_argument("PSD block '" + b.label + "' has non-positive size");
  }
  if (static_cast<int>(free_objective.size()) != free_vars) {
    throw std::invalid_argument("free objective length does not match free variable count");
  }
  auto check_entry = [&](const SdpEntry& e) {
    if (e.block < 0 || e.block >= static_cast<int>(blocks.size())) {
      throw std::invalid_argument("entry references missing block");
    }
    const int n = blocks[e.block].size;
    if (e.row < 0 || e.col < e.row || e.col >= n) {
      throw std::invalid_argument("entry outside upper triangle of block '" + blocks[e.block].label + "'");
    }
  };
  for (const auto& e : block_objective) check_entry(e);
  for (const auto& c : equalities) {
    for (const auto& e : c.entries) check_entry(e);
    for (const auto& [j, v] : c.free_entries) {
      if (j < 0 || j >= free_vars) throw std::invalid_argument("constraint references missing free variable");
    }
  }
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct LocalEntry {
  int row;
  int col;
  double value;
};

// Entries of one constraint restricted to one block.
struct BlockSlice {
  int constraint;
  std::vector<LocalEntry> entries;
};

// Problem data reorganized for the solver.
struct Model {
  int m = 0;
  int nf = 0;
  std::vector<int> sizes;
  std::vector<std::vector<BlockSlice>> slices;  // per block
  std::vector<MatrixXd> C;
  VectorXd b;
  VectorXd cu;
  MatrixXd B;  // m x nf
  int total_dim = 0;
};

Model build_model(const SdpProblem& prob) {
  Model md;
  md.m = static_cast<int>(prob.equalities.size());
  md.nf = prob.free_vars;
  const auto nb = prob.blocks.size();
  md.slices.resize(nb);
  for (const auto& blk : prob.blocks) {
    md.sizes.push_back(blk.size);
    md.C.push_back(MatrixXd::Zero(blk.size, blk.size));
    md.total_dim += blk.size;
  }
  for (const auto& e : prob.block_objective) {
    md.C[e.block](e.row, e.col) += e.value;
    if (e.row != e.col) md.C[e.block](e.col, e.row) += e.value;
  }
  md.b.resize(md.m);
  md.B = MatrixXd::Zero(md.m, md.nf);
  md.cu = VectorXd::Zero(md.nf);
  for (int j = 0; j < md.nf; ++j) md.cu(j) = prob.free_objective[j];
  for (int i = 0; i < md.m; ++i) {
    const auto& con = prob.equalities[i];
    md.b(i) = con.rhs;
    for (const auto& [j, v] : con.free_entries) md.B(i, j) += v;
    std::map<int, std::vector<LocalEntry>> per_block;
    for (const auto& e : con.entries) per_block[e.block].push_back({e.row, e.col, e.value});
    for (auto& [blk, entries] : per_block) md.slices[blk].push_back({i, std::move(entries)});
  }
  return md;
}

double trace_inner(const std::vector<LocalEntry>& entries, const MatrixXd& X) {
  double s = 0.0;
  for (const auto& e : entries) s += (e.row == e.col ? 1.0 : 2.0) * e.value * X(e.row, e.col);
  return s;
}

VectorXd apply_A(const Model& md, const std::vector<MatrixXd>& X) {
  VectorXd out = VectorXd::Zero(md.m);
  for (std::size_t j = 0; j < X.size(); ++j) {
    for (const auto& sl : md.slices[j]) out(sl.constraint) += trace_inner(sl.entries, X[j]);
  }
  return out;
}

std::vector<MatrixXd> apply_At(const Model& md, const VectorXd& y) {
  std::vector<MatrixXd> out;
  for (std::size_t j = 0; j < md.sizes.size(); ++j) {
    MatrixXd S = MatrixXd::Zero(md.sizes[j], md.sizes[j]);
    for (const auto& sl : md.slices[j]) {
      const double yi = y(sl.constraint);
      if (yi == 0.0) continue;
      for (const auto& e : sl.entries) {
        S(e.row, e.col) += yi * e.value;
        if (e.row != e.col) S(e.col, e.row) += yi * e.value;
      }
    }
    out.push_back(std::move(S));
  }
  return out;
}

double frob_inner(const std::vector<MatrixXd>& A, const std::vector<MatrixXd>& B) {
  double s = 0.0;
  for (std::size_t j = 0; j < A.size(); ++j) s += A[j].cwiseProduct(B[j]).sum();
  return s;
}

double frob_norm(const std::vector<MatrixXd>& A) {
  double s = 0.0;
  for (const auto& a : A) s += a.squaredNorm();
  return std::sqrt(s);
}

double min_eigenvalue(const MatrixXd& X) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(X, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Largest alpha with X + alpha dX PSD (infinity if unbounded). Requires X PD.
bool max_step(const MatrixXd& X, const MatrixXd& dX, double& alpha) {
  Eigen::LLT<MatrixXd> llt(X);
  if (llt.info() != Eigen::Success) return false;
  const MatrixXd Linv = llt.matrixL().solve(MatrixXd::Identity(X.rows(), X.cols()));
  MatrixXd T = Linv * dX * Linv.transpose();
  T = 0.5 * (T + T.transpose());
  const double lmin = min_eigenvalue(T);
  alpha = lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
  return true;
}

// Nesterov-Todd scaling point of one block: W = G G^T with G^-1 X G^-T = G^T Z G = diag(d).
struct NtScaling {
  MatrixXd G;
  MatrixXd Ginv;
  MatrixXd W;
  VectorXd d;
};

bool nt_scaling(const MatrixXd& X, const MatrixXd& Z, NtScaling& out) {
  Eigen::LLT<MatrixXd> llt(X);
  if (llt.info() != Eigen::Success) return false;
  const MatrixXd L = llt.matrixL();
  MatrixXd T = L.transpose() * Z * L;
  T = 0.5 * (T + T.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(T);
  if (es.info() != Eigen::Success) return false;
  const VectorXd lam = es.eigenvalues();
  if (lam.minCoeff() <= 0.0) return false;
  const MatrixXd& U = es.eigenvectors();
  const VectorXd q = lam.array().pow(-0.25);
  out.G = L * U * q.asDiagonal();
  const MatrixXd Linv = L.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(X.rows(), X.cols()));
  out.Ginv = lam.array().pow(0.25).matrix().asDiagonal() * U.transpose() * Linv;
  out.W = out.G * out.G.transpose();
  out.W = 0.5 * (out.W + out.W.transpose());
  out.d = lam.array().sqrt();
  return true;
}

// M_ik = sum_j <A_ij, W_j A_kj W_j>.
MatrixXd schur_complement(const Model& md, const std::vector<NtScaling>& nt) {
  MatrixXd M = MatrixXd::Zero(md.m, md.m);
  for (std::size_t j = 0; j < md.sizes.size(); ++j) {
    const MatrixXd& W = nt[j].W;
    const int n = md.sizes[j];
    MatrixXd G(n, n);
    for (const auto& sk : md.slices[j]) {
      G.setZero();
      for (const auto& e : sk.entries) {
        if (e.row == e.col) {
          G.noalias() += e.value * W.col(e.row) * W.row(e.row);
        } else {
          G.noalias() += e.value * (W.col(e.row) * W.row(e.col) + W.col(e.col) * W.row(e.row));
        }
      }
      for (const auto& si : md.slices[j]) M(si.constraint, sk.constraint) += trace_inner(si.entries, G);
    }
  }
  return 0.5 * (M + M.transpose());
}

struct Iterate {
  std::vector<MatrixXd> X;
  std::vector<MatrixXd> Z;
  VectorXd y;
  VectorXd u;
};

struct Residuals {
  VectorXd rp;
  std::vector<MatrixXd> Rd;
  VectorXd rf;
  double pobj = 0.0;
  double dobj = 0.0;
  double pinf = 0.0;
  double dinf = 0.0;
  double relgap = 0.0;
  double mu = 0.0;
};

Residuals residuals(const Model& md, const Iterate& it, double norm_b, double norm_c) {
  Residuals r;
  r.rp = md.b - apply_A(md, it.X) - md.B * it.u;
  auto Aty = apply_At(md, it.y);
  r.Rd.resize(md.sizes.size());
  for (std::size_t j = 0; j < md.sizes.size(); ++j) r.Rd[j] = md.C[j] - Aty[j] - it.Z[j];
  r.rf = md.cu - md.B.transpose() * it.y;
  r.pobj = frob_inner(md.C, it.X) + md.cu.dot(it.u);
  r.dobj = md.b.dot(it.y);
  r.pinf = r.rp.norm() / (1.0 + norm_b);
  const double rd = std::sqrt(std::pow(frob_norm(r.Rd), 2) + r.rf.squaredNorm());
  r.dinf = rd / (1.0 + norm_c);
  r.relgap = std::abs(r.pobj - r.dobj) / (1.0 + std::abs(r.pobj) + std::abs(r.dobj));
  r.mu = md.total_dim > 0 ? frob_inner(it.X, it.Z) / md.total_dim : 0.0;
  return r;
}

struct Direction {
  std::vector<MatrixXd> dX;
  std::vector<MatrixXd> dZ;
  VectorXd dy;
  VectorXd du;
};

class NewtonSystem {
 public:
  NewtonSystem(const Model& md, const std::vector<NtScaling>& nt) : md_(md), nt_(nt) {
    const int m = md.m;
    const int nf = md.nf;
    K_ = MatrixXd::Zero(m + nf, m + nf);
    K_.topLeftCorner(m, m) = schur_complement(md, nt);
    K_.topRightCorner(m, nf) = md.B;
    K_.bottomLeftCorner(nf, m) = md.B.transpose();
    // Equilibrate rows/columns symmetrically before factoring.
    scale_ = VectorXd::Ones(m + nf);
    for (int i = 0; i < m + nf; ++i) {
      const double mx = K_.row(i).cwiseAbs().maxCoeff();
      if (mx > 0.0) scale_(i) = 1.0 / std::sqrt(mx);
    }
    Ks_ = scale_.asDiagonal() * K_ * scale_.asDiagonal();
    lu_.compute(Ks_);
  }

  bool ok() const {
    return std::isfinite(lu_.rcond()) && lu_.rcond() > 1e-30;
  }

  // Solves the coupled system for complementarity target Rc (per block).
  Direction solve(const Residuals& r, const std::vector<MatrixXd>& Rc) const {
    const int m = md_.m;
    const int nf = md_.nf;
    std::vector<MatrixXd> T(md_.sizes.size());
    for (std::size_t j = 0; j < T.size(); ++j) T[j] = Rc[j] - nt_[j].W * r.Rd[j] * nt_[j].W;
    VectorXd rhs(m + nf);
    rhs.head(m) = r.rp - apply_A(md_, T);
    rhs.tail(nf) = r.rf;
    VectorXd sol = solve_scaled(rhs);
    // Two rounds of iterative refinement against the unscaled matrix.
    for (int k = 0; k < 2; ++k) {
      const VectorXd res = rhs - K_ * sol;
      sol += solve_scaled(res);
    }
    Direction dir;
    dir.dy = sol.head(m);
    dir.du = sol.tail(nf);
    const auto Atdy = apply_At(md_, dir.dy);
    dir.dZ.resize(T.size());
    dir.dX.resize(T.size());
    for (std::size_t j = 0; j < T.size(); ++j) {
      dir.dZ[j] = r.Rd[j] - Atdy[j];
      dir.dX[j] = Rc[j] - nt_[j].W * dir.dZ[j] * nt_[j].W;
      dir.dX[j] = 0.5 * (dir.dX[j] + dir.dX[j].transpose());
      dir.dZ[j] = 0.5 * (dir.dZ[j] + dir.dZ[j].transpose());
    }
    return dir;
  }

 private:
  VectorXd solve_scaled(const VectorXd& rhs) const {
    return scale_.asDiagonal() * lu_.solve(scale_.asDiagonal() * rhs);
  }

  const Model& md_;
  const std::vector<NtScaling>& nt_;
  MatrixXd K_;
  MatrixXd Ks_;
  VectorXd scale_;
  Eigen::PartialPivLU<MatrixXd> lu_;
};

// Complementarity right-hand side G S G^T where (S D + D S)/2 = R.
MatrixXd complementarity_target(const NtScaling& nt, const MatrixXd& R) {
  const auto n = nt.d.size();
  MatrixXd S(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) S(i, k) = 2.0 * R(i, k) / (nt.d(i) + nt.d(k));
  }
  MatrixXd out = nt.G * S * nt.G.transpose();
  return 0.5 * (out + out.transpose());
}

bool step_lengths(const Iterate& it, const Direction& dir, double& ap, double& ad) {
  ap = std::numeric_limits<double>::infinity();
  ad = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < it.X.size(); ++j) {
    double a = 0.0;
    if (!max_step(it.X[j], dir.dX[j], a)) return false;
    ap = std::min(ap, a);
    if (!max_step(it.Z[j], dir.dZ[j], a)) return false;
    ad = std::min(ad, a);
  }
  return true;
}

SdpSolution pack(const Model& md, const Iterate& it, const Residuals& r, int iter, SdpStatus status) {
  SdpSolution sol;
  sol.block_matrices = it.X;
  sol.dual_slacks = it.Z;
  sol.free_values.assign(it.u.data(), it.u.data() + it.u.size());
  sol.dual_values.assign(it.y.data(), it.y.data() + it.y.size());
  sol.primal_objective = r.pobj;
  sol.dual_objective = r.dobj;
  sol.gap = r.relgap;
  sol.primal_infeasibility = r.pinf;
  sol.dual_infeasibility = r.dinf;
  sol.iterations = iter;
  sol.status = status;
  (void)md;
  return sol;
}

}  // namespace

SdpSolution solve(const SdpProblem& prob, const SdpOptions& opts) {
  prob.validate();
  if (prob.equalities.empty()) throw std::invalid_argument("SDP needs at least one equality constraint");
  if (prob.blocks.empty()) throw std::invalid_argument("SDP needs at least one PSD block");
  const Model md = build_model(prob);
  const std::size_t nb = md.sizes.size();

  const double norm_b = md.b.norm();
  const double norm_c = std::sqrt(std::pow(frob_norm(md.C), 2) + md.cu.squaredNorm());

  // Scaled-identity starting point.
  Iterate it;
  for (std::size_t j = 0; j < nb; ++j) {
    const int n = md.sizes[j];
    const double sqn = std::sqrt(static_cast<double>(n));
    double xi = std::max(10.0, sqn);
    double eta = std::max({10.0, sqn, md.C[j].norm()});
    for (const auto& sl : md.slices[j]) {
      double fnorm = 0.0;
      for (const auto& e : sl.entries) fnorm += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
      fnorm = std::sqrt(fnorm);
      xi = std::max(xi, sqn * (1.0 + std::abs(md.b(sl.constraint))) / (1.0 + fnorm));
      eta = std::max(eta, fnorm);
    }
    it.X.push_back(xi * MatrixXd::Identity(n, n));
    it.Z.push_back(eta * MatrixXd::Identity(n, n));
  }
  it.y = VectorXd::Zero(md.m);
  it.u = VectorXd::Zero(md.nf);

  Residuals r = residuals(md, it, norm_b, norm_c);
  Iterate best = it;
  Residuals best_r = r;
  auto merit = [](const Residuals& q) { return std::max({q.pinf, q.dinf, q.relgap}); };
  int stall = 0;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (opts.verbose) {
      std::fprintf(stderr, "%3d  p=% .10e d=% .10e gap=%.2e pinf=%.2e dinf=%.2e mu=%.2e\n", iter, r.pobj,
                   r.dobj, r.relgap, r.pinf, r.dinf, r.mu);
    }
    if (r.pinf <= opts.tol && r.dinf <= opts.tol && r.relgap <= opts.tol) {
      return pack(md, it, r, iter, SdpStatus::optimal);
    }
    if (std::max(std::abs(r.pobj), std::abs(r.dobj)) > 1e12 || it.y.norm() > 1e14) {
      return pack(md, best, best_r, iter, SdpStatus::infeasible_suspected);
    }

    std::vector<NtScaling> nt(nb);
    for (std::size_t j = 0; j < nb; ++j) {
      if (!nt_scaling(it.X[j], it.Z[j], nt[j])) return pack(md, best, best_r, iter, SdpStatus::numerical_failure);
    }
    NewtonSystem newton(md, nt);
    if (!newton.ok()) return pack(md, best, best_r, iter, SdpStatus::numerical_failure);

    // Predictor: target complementarity zero.
    std::vector<MatrixXd> Rc(nb);
    for (std::size_t j = 0; j < nb; ++j) Rc[j] = -it.X[j];
    const Direction pred = newton.solve(r, Rc);
    double ap = 0.0, ad = 0.0;
    if (!step_lengths(it, pred, ap, ad)) return pack(md, best, best_r, iter, SdpStatus::numerical_failure);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double mu_aff = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      mu_aff += (it.X[j] + ap * pred.dX[j]).cwiseProduct(it.Z[j] + ad * pred.dZ[j]).sum();
    }
    mu_aff /= md.total_dim;
    const double expon = std::max(1.0, 3.0 * std::pow(std::min(ap, ad), 2));
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / r.mu, expon), 0.0, 1.0);

    // Corrector with the second-order term, in the scaled space.
    for (std::size_t j = 0; j < nb; ++j) {
      const MatrixXd dXs = nt[j].Ginv * pred.dX[j] * nt[j].Ginv.transpose();
      const MatrixXd dZs = nt[j].G.transpose() * pred.dZ[j] * nt[j].G;
      MatrixXd prod = dXs * dZs;
      MatrixXd R = -0.5 * (prod + prod.transpose());
      R.diagonal().array() += sigma * r.mu;
      R.diagonal() -= nt[j].d.cwiseAbs2();
      Rc[j] = complementarity_target(nt[j], R);
    }
    const Direction dir = newton.solve(r, Rc);
    if (!step_lengths(it, dir, ap, ad)) return pack(md, best, best_r, iter, SdpStatus::numerical_failure);
    ap = std::min(1.0, opts.step_fraction * ap);
    ad = std::min(1.0, opts.step_fraction * ad);

    for (std::size_t j = 0; j < nb; ++j) {
      it.X[j] += ap * dir.dX[j];
      it.Z[j] += ad * dir.dZ[j];
    }
    it.u += ap * dir.du;
    it.y += ad * dir.dy;
    r = residuals(md, it, norm_b, norm_c);
    if (!std::isfinite(r.pobj) || !std::isfinite(r.dobj)) {
      return pack(md, best, best_r, iter + 1, SdpStatus::numerical_failure);
    }
    if (merit(r) < merit(best_r)) {
      best = it;
      best_r = r;
    }
    stall = (ap < 1e-10 && ad < 1e-10) ? stall + 1 : 0;
    // A nonpositive mu means the iterate has lost interiority to rounding; further
    // steps only inflate the primal residual.
    if (stall >= 5 || !(r.mu > 0.0)) {
      const bool ok = best_r.pinf <= opts.tol && best_r.dinf <= opts.tol && best_r.relgap <= opts.tol;
      return pack(md, best, best_r, iter + 1, ok ? SdpStatus::optimal : SdpStatus::numerical_failure);
    }
  }
  if (r.pinf <= opts.tol && r.dinf <= opts.tol && r.relgap <= opts.tol) {
    return pack(md, it, r, opts.max_iter, SdpStatus::optimal);
  }
  return pack(md, best, best_r, opts.max_iter, SdpStatus::max_iterations);
}

KktReport check_kkt(const SdpProblem& prob, const SdpSolution& sol, double tol) {
  prob.validate();
  const Model md = build_model(prob);
  const std::size_t nb = md.sizes.size();
  if (sol.block_matrices.size() != nb || sol.dual_slacks.size() != nb ||
      static_cast<int>(sol.free_values.size()) != md.nf || static_cast<int>(sol.dual_values.size()) != md.m) {
    throw std::invalid_argument("solution shape does not match problem");
  }
  const VectorXd u = Eigen::Map<const VectorXd>(sol.free_values.data(), md.nf);
  const VectorXd y = Eigen::Map<const VectorXd>(sol.dual_values.data(), md.m);
  KktReport rep;
  rep.primal_residual = (md.b - apply_A(md, sol.block_matrices) - md.B * u).norm();
  const auto Aty = apply_At(md, y);
  double dres = (md.cu - md.B.transpose() * y).squaredNorm();
  for (std::size_t j = 0; j < nb; ++j) dres += (md.C[j] - Aty[j] - sol.dual_slacks[j]).squaredNorm();
  rep.dual_residual = std::sqrt(dres);
  rep.complementarity = frob_inner(sol.block_matrices, sol.dual_slacks);
  const double pobj = frob_inner(md.C, sol.block_matrices) + md.cu.dot(u);
  const double dobj = md.b.dot(y);
  rep.duality_gap = std::abs(pobj - dobj);
  rep.min_eig_primal = std::numeric_limits<double>::infinity();
  rep.min_eig_dual = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < nb; ++j) {
    rep.min_eig_primal = std::min(rep.min_eig_primal, min_eigenvalue(sol.block_matrices[j]));
    rep.min_eig_dual = std::min(rep.min_eig_dual, min_eigenvalue(sol.dual_slacks[j]));
  }
  const double norm_c = std::sqrt(std::pow(frob_norm(md.C), 2) + md.cu.squaredNorm());
  rep.pass = rep.primal_residual <= tol * (1.0 + md.b.norm()) && rep.dual_residual <= tol * (1.0 + norm_c) &&
             rep.duality_gap <= tol * (1.0 + std::abs(pobj) + std::abs(dobj)) && rep.min_eig_primal >= -tol &&
             rep.min_eig_dual >= -tol;
  return rep;
}

namespace {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string export_standard_form(const SdpProblem& prob) {
  prob.validate();
  const int nb = static_cast<int>(prob.blocks.size());
  const int nf = prob.free_vars;
  std::string out;
  out += std::to_string(prob.equalities.size()) + "\n";
  out += std::to_string(nb + (nf > 0 ? 1 : 0)) + "\n";
  for (int j = 0; j < nb; ++j) out += (j ? " " : "") + std::to_string(prob.blocks[j].size);
  if (nf > 0) out += (nb ? " " : "") + std::to_string(-2 * nf);
  out += "\n";
  for (std::size_t i = 0; i < prob.equalities.size(); ++i) {
    out += (i ? " " : "") + format_number(prob.equalities[i].rhs);
  }
  out += "\n";

  // (block, row, col) -> value, 1-based, duplicates summed, zeros dropped.
  using Key = std::tuple<int, int, int>;
  auto emit = [&](int matno, const std::map<Key, double>& entries) {
    for (const auto& [k, v] : entries) {
      if (v == 0.0) continue;
      out += std::to_string(matno) + " " + std::to_string(std::get<0>(k)) + " " + std::to_string(std::get<1>(k)) +
             " " + std::to_string(std::get<2>(k)) + " " + format_number(v) + "\n";
    }
  };

  std::map<Key, double> f0;
  for (const auto& e : prob.block_objective) f0[{e.block + 1, e.row + 1, e.col + 1}] -= e.value;
  for (int j = 0; j < nf; ++j) {
    f0[{nb + 1, j + 1, j + 1}] -= prob.free_objective[j];
    f0[{nb + 1, nf + j + 1, nf + j + 1}] += prob.free_objective[j];
  }
  emit(0, f0);
  for (std::size_t i = 0; i < prob.equalities.size(); ++i) {
    std::map<Key, double> fi;
    for (const auto& e : prob.equalities[i].entries) fi[{e.block + 1, e.row + 1, e.col + 1}] += e.value;
    for (const auto& [j, v] : prob.equalities[i].free_entries) {
      fi[{nb + 1, j + 1, j + 1}] += v;
      fi[{nb + 1, nf + j + 1, nf + j + 1}] -= v;
    }
    emit(static_cast<int>(i) + 1, fi);
  }
  return out;
}

}  // namespace confreach
