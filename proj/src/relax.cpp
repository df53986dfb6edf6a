#include "confreach/relax.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace confreach {

void ProblemSpec::validate() const {
  if (static_cast<int>(dynamics.size()) != nx()) {
    throw std::invalid_argument("dynamics arity must equal the state dimension");
  }
  for (const auto& f : dynamics) {
    if (!(f.space() == flow_space())) throw std::invalid_argument("dynamics must be polynomials in (t, x, theta)");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon must be positive");
  if (!state_box.contains(target_box)) throw std::invalid_argument("target box must lie inside the state box");
}

ScaledProblem scale_problem(const ProblemSpec& spec) {
  spec.validate();
  ScaledProblem sp;
  sp.state_map = AffineMap::to_unit(spec.state_box);
  sp.theta_map = AffineMap::to_unit(spec.theta_box);
  sp.horizon = spec.horizon;
  sp.target = spec.target_box.scaled_by(spec.state_box);

  // f(t, x, theta) with t = T tau, x = c + h y, theta = c' + h' phi; dy/dtau = T f / h.
  std::vector<double> scale{spec.horizon};
  std::vector<double> offset{0.0};
  scale.insert(scale.end(), sp.state_map.scale.begin(), sp.state_map.scale.end());
  offset.insert(offset.end(), sp.state_map.offset.begin(), sp.state_map.offset.end());
  scale.insert(scale.end(), sp.theta_map.scale.begin(), sp.theta_map.scale.end());
  offset.insert(offset.end(), sp.theta_map.offset.begin(), sp.theta_map.offset.end());
  for (int i = 0; i < spec.nx(); ++i) {
    sp.dynamics.push_back(spec.dynamics[i].affine_substitute(scale, offset) *
                          (spec.horizon / sp.state_map.scale[i]));
  }
  return sp;
}

namespace {

// Polynomial affine in the decision variables: p = constant + sum_j u_j * basis_j.
struct AffinePoly {
  MultiPoly constant;
  std::vector<std::pair<int, MultiPoly>> linear;
};

// Appends the Putinar-form group "p = sigma0 + sum sigma_i g_i" to the SDP.
ConstraintGroup add_putinar_group(SdpProblem& sdp, const std::string& label, VarSpace space, int degree,
                                  const AffinePoly& p, const std::vector<std::pair<std::string, MultiPoly>>& gs) {
  ConstraintGroup group;
  group.label = label;
  group.space = space;
  group.rows = basis_enumerate(space.total(), degree);
  group.first_row = static_cast<int>(sdp.equalities.size());
  group.row_count = static_cast<int>(group.rows.size());
  sdp.equalities.resize(sdp.equalities.size() + group.rows.size());
  auto row_of = [&](const Exponent& e) -> SdpConstraint& {
    const long r = group.rows.index_of(e);
    if (r < 0) throw std::invalid_argument("constraint group '" + label + "' exceeds its degree budget");
    return sdp.equalities[group.first_row + r];
  };

  // Gram side: + <A, Q> ; decision side: - sum_j u_j [basis_j]_alpha ; rhs: [constant]_alpha.
  for (const auto& [e, c] : p.constant.terms()) row_of(e).rhs += c;
  for (const auto& [j, poly] : p.linear) {
    for (const auto& [e, c] : poly.terms()) row_of(e).free_entries.emplace_back(j, -c);
  }

  auto add_gram = [&](const std::string& name, const MultiPoly& g, int gram_degree) {
    const auto basis = basis_enumerate(space.total(), gram_degree);
    const int block = static_cast<int>(sdp.blocks.size());
    sdp.blocks.push_back({label + "." + name, static_cast<int>(basis.size())});
    group.blocks.push_back(block);
    Exponent e(space.total());
    for (std::size_t a = 0; a < basis.size(); ++a) {
      for (std::size_t b = a; b < basis.size(); ++b) {
        for (const auto& [ge, gc] : g.terms()) {
          for (int v = 0; v < space.total(); ++v) {
            e[v] = static_cast<std::uint16_t>(basis.exponents[a][v] + basis.exponents[b][v] + ge[v]);
          }
          row_of(e).entries.push_back({block, static_cast<int>(a), static_cast<int>(b), gc});
        }
      }
    }
  };

  add_gram("sigma0", MultiPoly::constant(space, 1.0), degree / 2);
  for (const auto& [name, g] : gs) {
    const int gdeg = g.degree();
    if (gdeg > degree) throw std::invalid_argument("relaxation degree smaller than a domain inequality degree");
    add_gram("sigma[" + name + "]", g, (degree - gdeg) / 2);
  }
  return group;
}

MultiPoly interval_poly(VarSpace space, int var, double lo, double hi) {
  const auto z = MultiPoly::variable(space, var);
  return (MultiPoly::constant(space, hi) - z) * (z - MultiPoly::constant(space, lo));
}

}  // namespace

Relaxation assemble_dual_relaxation(const ProblemSpec& spec, int degree) {
  if (degree < 2 || degree % 2 != 0) throw std::invalid_argument("relaxation degree must be even and >= 2");
  Relaxation rx;
  rx.degree = degree;
  rx.scaled = scale_problem(spec);
  const int nx = spec.nx();
  const int nth = spec.ntheta();
  rx.v_space = VarSpace::txtheta(nx, nth);
  rx.w_space = VarSpace::xtheta(nx, nth);

  int field_degree = 1;
  for (const auto& f : rx.scaled.dynamics) field_degree = std::max(field_degree, f.degree());
  rx.v_degree = degree + 1 - field_degree;
  if (rx.v_degree < 1) throw std::invalid_argument("relaxation degree too small for the dynamics degree");

  rx.v_basis = basis_enumerate(rx.v_space.total(), rx.v_degree);
  rx.w_basis = basis_enumerate(rx.w_space.total(), degree);
  rx.v_offset = 0;
  rx.w_offset = static_cast<int>(rx.v_basis.size());
  SdpProblem& sdp = rx.sdp;
  sdp.free_vars = static_cast<int>(rx.v_basis.size() + rx.w_basis.size());
  sdp.free_objective.assign(sdp.free_vars, 0.0);

  const Box unit = Box(std::vector<double>(nx + nth, -1.0), std::vector<double>(nx + nth, 1.0));
  for (std::size_t k = 0; k < rx.w_basis.size(); ++k) {
    sdp.free_objective[rx.w_offset + k] = lebesgue_moment(unit, rx.w_basis.exponents[k]);
  }
  rx.objective_scale = rx.scaled.state_map.jacobian() * rx.scaled.theta_map.jacobian();

  std::vector<MultiPoly> v_monomials, w_monomials, v_at0, v_at1;
  for (const auto& e : rx.v_basis.exponents) {
    const auto m = MultiPoly::monomial(rx.v_space, e);
    v_monomials.push_back(m);
    v_at0.push_back(m.substitute(rx.v_space.t_index(), 0.0).reembed(rx.w_space));
    v_at1.push_back(m.substitute(rx.v_space.t_index(), 1.0).reembed(rx.w_space));
  }
  for (const auto& e : rx.w_basis.exponents) w_monomials.push_back(MultiPoly::monomial(rx.w_space, e));

  // Domain inequalities in scaled coordinates.
  std::vector<std::pair<std::string, MultiPoly>> g_flow, g_init, g_target;
  g_flow.emplace_back("t", interval_poly(rx.v_space, rx.v_space.t_index(), 0.0, 1.0));
  for (int i = 0; i < nx; ++i) {
    const auto name = rx.v_space.name(rx.v_space.x_index(i));
    g_flow.emplace_back(name, interval_poly(rx.v_space, rx.v_space.x_index(i), -1.0, 1.0));
    g_init.emplace_back(name, interval_poly(rx.w_space, rx.w_space.x_index(i), -1.0, 1.0));
    g_target.emplace_back(name, interval_poly(rx.w_space, rx.w_space.x_index(i), rx.scaled.target.lower(i),
                                              rx.scaled.target.upper(i)));
  }
  for (int k = 0; k < nth; ++k) {
    const auto name = rx.v_space.name(rx.v_space.theta_index(k));
    g_flow.emplace_back(name, interval_poly(rx.v_space, rx.v_space.theta_index(k), -1.0, 1.0));
    g_init.emplace_back(name, interval_poly(rx.w_space, rx.w_space.theta_index(k), -1.0, 1.0));
    g_target.emplace_back(name, interval_poly(rx.w_space, rx.w_space.theta_index(k), -1.0, 1.0));
  }

  // (c1) -L v >= 0 on [0,1] x [-1,1]^n x [-1,1]^m
  AffinePoly c1{MultiPoly(rx.v_space), {}};
  for (std::size_t j = 0; j < v_monomials.size(); ++j) {
    c1.linear.emplace_back(rx.v_offset + static_cast<int>(j), -lie_derivative(v_monomials[j], rx.scaled.dynamics));
  }
  // (c2) w >= 0
  AffinePoly c2{MultiPoly(rx.w_space), {}};
  for (std::size_t k = 0; k < w_monomials.size(); ++k) c2.linear.emplace_back(rx.w_offset + static_cast<int>(k), w_monomials[k]);
  // (c3) w - v(0, .) - 1 >= 0
  AffinePoly c3{MultiPoly::constant(rx.w_space, -1.0), c2.linear};
  for (std::size_t j = 0; j < v_at0.size(); ++j) c3.linear.emplace_back(rx.v_offset + static_cast<int>(j), -v_at0[j]);
  // (c4) v(1, .) >= 0 on X_T x Theta
  AffinePoly c4{MultiPoly(rx.w_space), {}};
  for (std::size_t j = 0; j < v_at1.size(); ++j) c4.linear.emplace_back(rx.v_offset + static_cast<int>(j), v_at1[j]);

  rx.groups.push_back(add_putinar_group(sdp, "c1", rx.v_space, degree, c1, g_flow));
  rx.groups.push_back(add_putinar_group(sdp, "c2", rx.w_space, degree, c2, g_init));
  rx.groups.push_back(add_putinar_group(sdp, "c3", rx.w_space, degree, c3, g_init));
  rx.groups.push_back(add_putinar_group(sdp, "c4", rx.w_space, degree, c4, g_target));
  sdp.validate();
  return rx;
}

Certificate extract_certificate(const Relaxation& rx, const SdpSolution& sol) {
  if (static_cast<int>(sol.free_values.size()) != rx.sdp.free_vars) {
    throw std::invalid_argument("solution does not belong to this relaxation");
  }
  std::vector<std::pair<Exponent, double>> vt, wt;
  for (std::size_t j = 0; j < rx.v_basis.size(); ++j) vt.emplace_back(rx.v_basis.exponents[j], sol.free_values[rx.v_offset + j]);
  for (std::size_t k = 0; k < rx.w_basis.size(); ++k) wt.emplace_back(rx.w_basis.exponents[k], sol.free_values[rx.w_offset + k]);
  Certificate cert;
  cert.v_scaled = MultiPoly(rx.v_space, vt);
  cert.w_scaled = MultiPoly(rx.w_space, wt);

  // Original coordinates: s = (z - offset) / scale.
  const auto& xm = rx.scaled.state_map;
  const auto& tm = rx.scaled.theta_map;
  std::vector<double> ws, wo;
  for (int i = 0; i < xm.dim(); ++i) {
    ws.push_back(1.0 / xm.scale[i]);
    wo.push_back(-xm.offset[i] / xm.scale[i]);
  }
  for (int k = 0; k < tm.dim(); ++k) {
    ws.push_back(1.0 / tm.scale[k]);
    wo.push_back(-tm.offset[k] / tm.scale[k]);
  }
  std::vector<double> vs{1.0 / rx.scaled.horizon}, vo{0.0};
  vs.insert(vs.end(), ws.begin(), ws.end());
  vo.insert(vo.end(), wo.begin(), wo.end());
  cert.v = cert.v_scaled.affine_substitute(vs, vo);
  cert.w = cert.w_scaled.affine_substitute(ws, wo);
  cert.objective = sol.primal_objective * rx.objective_scale;
  cert.dual_objective = sol.dual_objective * rx.objective_scale;
  return cert;
}

std::vector<double> group_moments(const Relaxation& rx, const SdpSolution& sol, int group) {
  const auto& g = rx.groups.at(group);
  return {sol.dual_values.begin() + g.first_row, sol.dual_values.begin() + g.first_row + g.row_count};
}

RelaxationResult solve_relaxation(const ProblemSpec& spec, int degree, const SdpOptions& opts) {
  RelaxationResult res;
  res.relaxation = assemble_dual_relaxation(spec, degree);
  res.solution = solve(res.relaxation.sdp, opts);
  res.certificate = extract_certificate(res.relaxation, res.solution);
  return res;
}

FeasibilityReport feasibility_report(const ProblemSpec& spec, const MultiPoly& v, const MultiPoly& w,
                                     int sample_count, double tol, std::uint64_t seed) {
  spec.validate();
  if (!(v.space() == spec.flow_space())) throw std::invalid_argument("v must be a polynomial in (t, x, theta)");
  if (!(w.space() == spec.initial_space())) throw std::invalid_argument("w must be a polynomial in (x, theta)");
  const int nx = spec.nx();
  const int nth = spec.ntheta();
  const MultiPoly lv = lie_derivative(v, spec.dynamics);
  const MultiPoly v0 = v.substitute(0, 0.0).reembed(spec.initial_space());
  const MultiPoly vT = v.substitute(0, spec.horizon).reembed(spec.initial_space());
  const PolyEvaluator e_lv(lv), e_w(w), e_v0(v0), e_vT(vT);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  FeasibilityReport rep;
  rep.samples = sample_count;
  rep.min_value.fill(std::numeric_limits<double>::infinity());
  std::vector<double> txt(1 + nx + nth), xt(nx + nth), target_pt(nx + nth);
  for (int s = 0; s < sample_count; ++s) {
    txt[0] = draw(0.0, spec.horizon);
    for (int i = 0; i < nx; ++i) {
      txt[1 + i] = draw(spec.state_box.lower(i), spec.state_box.upper(i));
      xt[i] = draw(spec.state_box.lower(i), spec.state_box.upper(i));
      target_pt[i] = draw(spec.target_box.lower(i), spec.target_box.upper(i));
    }
    for (int k = 0; k < nth; ++k) {
      txt[1 + nx + k] = draw(spec.theta_box.lower(k), spec.theta_box.upper(k));
      xt[nx + k] = draw(spec.theta_box.lower(k), spec.theta_box.upper(k));
      target_pt[nx + k] = draw(spec.theta_box.lower(k), spec.theta_box.upper(k));
    }
    const double wv = e_w(xt);
    rep.min_value[0] = std::min(rep.min_value[0], -e_lv(txt));
    rep.min_value[1] = std::min(rep.min_value[1], wv);
    rep.min_value[2] = std::min(rep.min_value[2], wv - e_v0(xt) - 1.0);
    rep.min_value[3] = std::min(rep.min_value[3], e_vT(target_pt));
  }
  rep.pass = true;
  for (int g = 0; g < FeasibilityReport::kGroups; ++g) {
    rep.max_violation[g] = std::max(0.0, -rep.min_value[g]);
    if (rep.max_violation[g] > tol) rep.pass = false;
  }
  return rep;
}

}  // namespace confreach
