#include "confreach/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace confreach {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items()) {
    (void)v;
    if (!ok.count(k)) throw ConfigError(where.empty() ? k : where + "." + k, "unknown key");
  }
}

const json& require(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ConfigError(where + "." + key, "required key is missing");
  return obj.at(key);
}

const json& object_at(const json& root, const char* key) {
  if (!root.contains(key)) throw ConfigError(key, "required key is missing");
  const json& j = root.at(key);
  if (!j.is_object()) throw ConfigError(key, "must be an object");
  return j;
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key, "must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
  return v;
}

int integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError(key, "must be an integer");
  return j.get<int>();
}

std::vector<double> number_list(const json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError(key, "must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

Box box_from(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) throw ConfigError(key, "must be a non-empty array of [lower, upper] pairs");
  std::vector<double> lo, hi;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string k = key + "[" + std::to_string(i) + "]";
    const auto pair = number_list(j[i], k);
    if (pair.size() != 2) throw ConfigError(k, "must be a [lower, upper] pair");
    lo.push_back(pair[0]);
    hi.push_back(pair[1]);
  }
  try {
    return Box(lo, hi);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
}

void check_degree(int degree, const std::string& key) {
  if (degree < 2 || degree % 2 != 0) throw ConfigError(key, "relaxation degree must be even and >= 2");
}

void check_alphas(const std::vector<double>& alphas, const std::string& key) {
  if (alphas.empty()) throw ConfigError(key, "needs at least one alpha");
  for (double a : alphas) {
    if (!(a > 0.0 && a <= 1.0)) throw ConfigError(key, "alpha values must lie in (0, 1]");
  }
}

ThetaDistribution distribution_from(const json& j, const Box& theta_box) {
  const std::string where = "theta_distribution";
  if (!j.is_object()) throw ConfigError(where, "must be an object");
  const json& kind_j = require(j, where, "kind");
  if (!kind_j.is_string()) throw ConfigError(where + ".kind", "must be a string");
  const std::string kind = kind_j.get<std::string>();
  if (kind == "uniform_box") {
    reject_unknown(j, where, {"kind", "box"});
    Box b = j.contains("box") ? box_from(j.at("box"), where + ".box") : theta_box;
    if (!theta_box.contains(b)) throw ConfigError(where + ".box", "must lie inside problem.theta_box");
    return ThetaDistribution::uniform(std::move(b));
  }
  if (kind == "discrete_atoms") {
    reject_unknown(j, where, {"kind", "atoms"});
    const json& atoms = require(j, where, "atoms");
    if (!atoms.is_array() || atoms.empty()) throw ConfigError(where + ".atoms", "must be a non-empty array");
    std::vector<ThetaDistribution::Atom> list;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string k = where + ".atoms[" + std::to_string(i) + "]";
      if (!atoms[i].is_object()) throw ConfigError(k, "must be an object");
      reject_unknown(atoms[i], k, {"point", "weight"});
      ThetaDistribution::Atom a{number_list(require(atoms[i], k, "point"), k + ".point"),
                                number(require(atoms[i], k, "weight"), k + ".weight")};
      if (static_cast<int>(a.point.size()) != theta_box.dim()) {
        throw ConfigError(k + ".point", "dimension does not match problem.theta_box");
      }
      if (!theta_box.contains(a.point)) throw ConfigError(k + ".point", "must lie inside problem.theta_box");
      list.push_back(std::move(a));
    }
    try {
      return ThetaDistribution::atoms(std::move(list));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ".atoms", e.what());
    }
  }
  if (kind == "moment_table") {
    reject_unknown(j, where, {"kind", "max_degree", "moments"});
    const int maxd = integer(require(j, where, "max_degree"), where + ".max_degree");
    const json& moments = require(j, where, "moments");
    if (!moments.is_array()) throw ConfigError(where + ".moments", "must be an array");
    std::map<Exponent, double> table;
    for (std::size_t i = 0; i < moments.size(); ++i) {
      const std::string k = where + ".moments[" + std::to_string(i) + "]";
      if (!moments[i].is_object()) throw ConfigError(k, "must be an object");
      reject_unknown(moments[i], k, {"exponent", "value"});
      const json& ej = require(moments[i], k, "exponent");
      if (!ej.is_array() || static_cast<int>(ej.size()) != theta_box.dim()) {
        throw ConfigError(k + ".exponent", "must list one nonnegative integer per parameter");
      }
      Exponent e;
      for (std::size_t c = 0; c < ej.size(); ++c) {
        const int p = integer(ej[c], k + ".exponent");
        if (p < 0) throw ConfigError(k + ".exponent", "must be nonnegative");
        e.push_back(static_cast<std::uint16_t>(p));
      }
      table[e] = number(require(moments[i], k, "value"), k + ".value");
    }
    try {
      return ThetaDistribution::table(theta_box.dim(), maxd, std::move(table));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ".moments", e.what());
    }
  }
  throw ConfigError(where + ".kind", "must be one of uniform_box, discrete_atoms, moment_table");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config", "top level must be an object");
  reject_unknown(root, "", {"problem", "theta_distribution", "relaxation", "solver", "extraction", "validation",
                            "output_dir"});

  const json& pj = object_at(root, "problem");
  reject_unknown(pj, "problem", {"dynamics", "horizon", "state_box", "theta_box", "target_box"});
  Box state = box_from(require(pj, "problem", "state_box"), "problem.state_box");
  Box theta = box_from(require(pj, "problem", "theta_box"), "problem.theta_box");
  Box target = box_from(require(pj, "problem", "target_box"), "problem.target_box");
  if (target.dim() != state.dim()) throw ConfigError("problem.target_box", "dimension differs from state_box");
  if (!state.contains(target)) throw ConfigError("problem.target_box", "must lie inside state_box");
  if (state.dim() > 2) {
    throw ConfigError("problem.state_box", "grid extraction supports at most 2 state dimensions");
  }
  const double horizon = number(require(pj, "problem", "horizon"), "problem.horizon");
  if (!(horizon > 0.0)) throw ConfigError("problem.horizon", "must be positive");

  const json& dj = require(pj, "problem", "dynamics");
  if (!dj.is_array() || static_cast<int>(dj.size()) != state.dim()) {
    throw ConfigError("problem.dynamics", "must list one polynomial string per state dimension");
  }
  const VarSpace flow = VarSpace::txtheta(state.dim(), theta.dim());
  std::vector<std::string> dyn_text;
  std::vector<MultiPoly> dyn;
  for (std::size_t i = 0; i < dj.size(); ++i) {
    const std::string k = "problem.dynamics[" + std::to_string(i) + "]";
    if (!dj[i].is_string()) throw ConfigError(k, "must be a string");
    dyn_text.push_back(dj[i].get<std::string>());
    try {
      dyn.push_back(parse_poly(dyn_text.back(), flow));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(k, e.what());
    }
  }

  if (!root.contains("theta_distribution")) throw ConfigError("theta_distribution", "required key is missing");
  ThetaDistribution dist = distribution_from(root.at("theta_distribution"), theta);

  const json& rj = object_at(root, "relaxation");
  reject_unknown(rj, "relaxation", {"degree"});
  const int degree = integer(require(rj, "relaxation", "degree"), "relaxation.degree");
  check_degree(degree, "relaxation.degree");

  SdpOptions solver;
  if (root.contains("solver")) {
    const json& sj = object_at(root, "solver");
    reject_unknown(sj, "solver", {"tol", "max_iter"});
    if (sj.contains("tol")) solver.tol = number(sj.at("tol"), "solver.tol");
    if (sj.contains("max_iter")) solver.max_iter = integer(sj.at("max_iter"), "solver.max_iter");
    if (!(solver.tol > 0.0)) throw ConfigError("solver.tol", "must be positive");
    if (solver.max_iter < 1) throw ConfigError("solver.max_iter", "must be >= 1");
  }

  std::vector<double> alphas{0.5};
  int resolution = 401;
  if (root.contains("extraction")) {
    const json& ej = object_at(root, "extraction");
    reject_unknown(ej, "extraction", {"alpha", "grid_resolution"});
    if (ej.contains("alpha")) {
      alphas = ej.at("alpha").is_number() ? std::vector<double>{number(ej.at("alpha"), "extraction.alpha")}
                                          : number_list(ej.at("alpha"), "extraction.alpha");
    }
    if (ej.contains("grid_resolution")) {
      resolution = integer(ej.at("grid_resolution"), "extraction.grid_resolution");
    }
  }
  check_alphas(alphas, "extraction.alpha");
  if (resolution < 2) throw ConfigError("extraction.grid_resolution", "must be >= 2");

  int samples = 2000, rk4_steps = 1000;
  std::uint64_t seed = 1;
  double margin = 3.0;
  if (root.contains("validation")) {
    const json& vj = object_at(root, "validation");
    reject_unknown(vj, "validation", {"samples", "seed", "stat_margin", "rk4_steps"});
    if (vj.contains("samples")) samples = integer(vj.at("samples"), "validation.samples");
    if (vj.contains("seed")) {
      if (!vj.at("seed").is_number_unsigned()) throw ConfigError("validation.seed", "must be a nonnegative integer");
      seed = vj.at("seed").get<std::uint64_t>();
    }
    if (vj.contains("stat_margin")) margin = number(vj.at("stat_margin"), "validation.stat_margin");
    if (vj.contains("rk4_steps")) rk4_steps = integer(vj.at("rk4_steps"), "validation.rk4_steps");
  }
  if (samples < 1) throw ConfigError("validation.samples", "must be >= 1");
  if (margin < 0.0) throw ConfigError("validation.stat_margin", "must be nonnegative");
  if (rk4_steps < 1) throw ConfigError("validation.rk4_steps", "must be >= 1");

  std::string out_dir = "out";
  if (root.contains("output_dir")) {
    if (!root.at("output_dir").is_string()) throw ConfigError("output_dir", "must be a string");
    out_dir = root.at("output_dir").get<std::string>();
  }

  return RunConfig{ProblemSpec{std::move(dyn), horizon, std::move(state), std::move(theta), std::move(target)},
                   std::move(dyn_text),
                   std::move(dist),
                   degree,
                   solver,
                   std::move(alphas),
                   resolution,
                   samples,
                   seed,
                   margin,
                   rk4_steps,
                   std::move(out_dir)};
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_degree_override(RunConfig& cfg, int degree) {
  check_degree(degree, "--degree");
  cfg.degree = degree;
}

void apply_alpha_override(RunConfig& cfg, const std::vector<double>& alphas) {
  check_alphas(alphas, "--alpha");
  cfg.alphas = alphas;
}

Grid state_grid(const RunConfig& cfg) {
  return Grid::lattice(cfg.problem.state_box, std::vector<int>(cfg.problem.nx(), cfg.grid_resolution));
}

}  // namespace confreach
