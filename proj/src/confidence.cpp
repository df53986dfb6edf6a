#include "confreach/confidence.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace confreach {

ConfidenceField build_confidence_field(const MultiPoly& w, const ThetaDistribution& dist, const Grid& grid,
                                       int relaxation_degree, double objective_value) {
  ConfidenceField field;
  field.marginal = marginalize_w(w, dist);
  field.grid = grid;
  field.relaxation_degree = relaxation_degree;
  field.objective_value = objective_value;
  const PolyEvaluator ev(field.marginal);
  field.values.reserve(grid.size());
  for (const auto& p : grid.points) {
    if (static_cast<int>(p.size()) != field.marginal.space().nx) {
      throw std::invalid_argument("grid dimension does not match state dimension");
    }
    field.values.push_back(ev(p));
  }
  return field;
}

ConfidenceField build_confidence_field(const MultiPoly& w_scaled, const ThetaDistribution& dist, const Grid& grid,
                                       const AffineMap& state_map, const AffineMap& theta_map,
                                       int relaxation_degree, double objective_value) {
  const AffineMap joint = state_map.product(theta_map);
  if (joint.dim() != w_scaled.space().total()) throw std::invalid_argument("scale map dimension mismatch");
  std::vector<double> scale, offset;
  for (int i = 0; i < joint.dim(); ++i) {
    scale.push_back(1.0 / joint.scale[i]);
    offset.push_back(-joint.offset[i] / joint.scale[i]);
  }
  return build_confidence_field(w_scaled.affine_substitute(scale, offset), dist, grid, relaxation_degree,
                                objective_value);
}

std::size_t AlphaSet::count() const {
  std::size_t c = 0;
  for (bool m : membership) c += m ? 1 : 0;
  return c;
}

std::vector<std::pair<double, double>> member_intervals(const Grid& grid, const std::vector<bool>& membership) {
  std::vector<std::pair<double, double>> out;
  if (grid.shape.size() != 1) return out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!membership[i]) continue;
    const double x = grid.points[i][0];
    if (i > 0 && membership[i - 1]) {
      out.back().second = x;
    } else {
      out.emplace_back(x, x);
    }
  }
  return out;
}

AlphaSet extract_alpha_set(const ConfidenceField& field, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  AlphaSet set;
  set.alpha = alpha;
  set.grid = field.grid;
  set.values = field.values;
  set.membership.reserve(field.values.size());
  for (double f : field.values) set.membership.push_back(f >= alpha);
  set.intervals = member_intervals(set.grid, set.membership);
  return set;
}

double binomial_margin(double alpha, int samples, double sigmas) {
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  return sigmas * std::sqrt(alpha * (1.0 - alpha) / samples);
}

ContainmentReport containment_report(const AlphaSet& est, const EmpiricalField& emp, double alpha,
                                     double stat_margin) {
  if (!(est.grid == emp.grid) || est.membership.size() != emp.values.size()) {
    throw std::invalid_argument("estimate and empirical field use different grids");
  }
  ContainmentReport rep;
  rep.alpha = alpha;
  rep.stat_margin = stat_margin;
  std::size_t emp_count = 0;
  for (std::size_t i = 0; i < emp.values.size(); ++i) {
    if (emp.values[i] >= alpha) ++emp_count;
    if (emp.values[i] >= alpha + stat_margin && !est.membership[i]) {
      ++rep.violations;
      rep.violating_points.push_back(i);
    }
  }
  rep.estimate_area = est.area();
  rep.empirical_area = static_cast<double>(emp_count) * emp.grid.cell_measure;
  rep.excess_area = rep.estimate_area - rep.empirical_area;
  return rep;
}

namespace {

void append_point(std::string& out, const std::vector<double>& p) {
  char buf[40];
  for (double x : p) {
    std::snprintf(buf, sizeof buf, "%.17g,", x);
    out += buf;
  }
}

std::string header(int nx) {
  std::string h;
  for (int i = 0; i < nx; ++i) h += "x" + std::to_string(i + 1) + ",";
  return h;
}

}  // namespace

std::string to_csv(const ConfidenceField& field) {
  std::string out = header(field.grid.dim()) + "F\n";
  char buf[40];
  for (std::size_t i = 0; i < field.grid.size(); ++i) {
    append_point(out, field.grid.points[i]);
    std::snprintf(buf, sizeof buf, "%.17g\n", field.values[i]);
    out += buf;
  }
  return out;
}

std::string to_csv(const AlphaSet& set) {
  std::string out = header(set.grid.dim()) + "F,member\n";
  char buf[48];
  for (std::size_t i = 0; i < set.grid.size(); ++i) {
    append_point(out, set.grid.points[i]);
    std::snprintf(buf, sizeof buf, "%.17g,%d\n", set.values[i], set.membership[i] ? 1 : 0);
    out += buf;
  }
  return out;
}

std::vector<bool> read_alpha_membership(const std::string& csv, std::size_t expected_rows) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line.find("member") == std::string::npos) {
    throw std::invalid_argument("alpha-set CSV lacks a header with a member column");
  }
  std::vector<bool> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    const std::string flag = comma == std::string::npos ? line : line.substr(comma + 1);
    if (flag != "0" && flag != "1") throw std::invalid_argument("alpha-set CSV has a bad member flag");
    out.push_back(flag == "1");
  }
  if (out.size() != expected_rows) throw std::invalid_argument("alpha-set CSV row count does not match the grid");
  return out;
}

}  // namespace confreach
