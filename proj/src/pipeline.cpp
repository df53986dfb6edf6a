#include "confreach/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "confreach/confidence.hpp"
#include "confreach/config.hpp"
#include "confreach/oracle.hpp"
#include "confreach/relax.hpp"

namespace confreach {

namespace fs = std::filesystem;
using nlohmann::json;

std::string alpha_file_name(double alpha) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "alpha_set_%g.csv", alpha);
  return buf;
}

namespace {

constexpr int kLiouvilleTrajectories = 10;
constexpr int kFeasibilitySamples = 10000;

// Stream index for the Liouville spot checks, kept apart from grid-point streams.
constexpr std::uint64_t kSpotCheckStream = 0xffffffff00000000ull;

struct Loaded {
  RunConfig cfg;
  fs::path out;
};

Loaded load(const CommandOptions& opts) {
  RunConfig cfg = load_config(opts.config_path);
  if (opts.degree) apply_degree_override(cfg, *opts.degree);
  if (opts.alphas) apply_alpha_override(cfg, *opts.alphas);
  fs::path out = opts.out_dir ? fs::path(*opts.out_dir) : fs::path(cfg.output_dir);
  return {std::move(cfg), std::move(out)};
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
  if (!f) throw std::runtime_error("write failed for " + p.string());
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("missing artifact " + p.string() + " (run solve first)");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json intervals_json(const std::vector<std::pair<double, double>>& iv) {
  json a = json::array();
  for (const auto& [lo, hi] : iv) a.push_back({lo, hi});
  return a;
}

// Runs `body`, mapping exceptions onto exit codes.
template <class Body>
int guarded(const char* verb, std::ostream& log, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << verb << ": config error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    log << verb << ": invalid input: " << e.what() << "\n";
  } catch (const std::exception& e) {
    log << verb << ": " << e.what() << "\n";
  }
  return kExitConfigError;
}

}  // namespace

int cmd_export(const CommandOptions& opts, std::ostream& log) {
  return guarded("export", log, [&] {
    const auto [cfg, out] = load(opts);
    const Relaxation rx = assemble_dual_relaxation(cfg.problem, cfg.degree);
    fs::create_directories(out);
    write_file(out / "problem.dat-s", export_standard_form(rx.sdp));
    log << "export: wrote " << (out / "problem.dat-s").string() << " (" << rx.sdp.equalities.size()
        << " equalities, " << rx.sdp.blocks.size() << " blocks, " << rx.sdp.free_vars << " free)\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_solve(const CommandOptions& opts, std::ostream& log) {
  return guarded("solve", log, [&] {
    const auto [cfg, out] = load(opts);
    const auto start = std::chrono::steady_clock::now();
    const Relaxation rx = assemble_dual_relaxation(cfg.problem, cfg.degree);
    fs::create_directories(out);
    write_file(out / "problem.dat-s", export_standard_form(rx.sdp));

    const SdpSolution sol = solve(rx.sdp, cfg.solver);
    const Certificate cert = extract_certificate(rx, sol);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    write_file(out / "w_poly", format_poly(cert.w));
    write_file(out / "v_poly", format_poly(cert.v));

    const Grid grid = state_grid(cfg);
    const ConfidenceField field =
        build_confidence_field(cert.w, cfg.distribution, grid, cfg.degree, cert.objective);
    write_file(out / "confidence_field.csv", to_csv(field));

    double min_f = field.values.empty() ? 0.0 : field.values.front();
    for (double f : field.values) min_f = std::min(min_f, f);

    json sets = json::array();
    for (double a : cfg.alphas) {
      const AlphaSet set = extract_alpha_set(field, a);
      write_file(out / alpha_file_name(a), to_csv(set));
      sets.push_back({{"alpha", a},
                      {"file", alpha_file_name(a)},
                      {"member_points", set.count()},
                      {"area", set.area()},
                      {"intervals", intervals_json(set.intervals)}});
    }

    const FeasibilityReport feas =
        feasibility_report(cfg.problem, cert.v, cert.w, kFeasibilitySamples, 1e-6, cfg.seed);
    json summary = {
        {"status", to_string(sol.status)},
        {"degree", cfg.degree},
        {"v_degree", rx.v_degree},
        {"objective", cert.objective},
        {"dual_objective", cert.dual_objective},
        {"gap", sol.gap},
        {"primal_infeasibility", sol.primal_infeasibility},
        {"dual_infeasibility", sol.dual_infeasibility},
        {"iterations", sol.iterations},
        {"sdp", {{"equalities", rx.sdp.equalities.size()}, {"blocks", rx.sdp.blocks.size()}, {"free_vars", rx.sdp.free_vars}}},
        {"min_confidence", min_f},
        {"feasibility",
         {{"samples", feas.samples},
          {"max_violation", feas.max_violation},
          {"pass", feas.pass}}},
        {"alpha_sets", sets},
    };
    write_file(out / "solution_summary", summary.dump(2) + "\n");

    char line[160];
    std::snprintf(line, sizeof line, "solve: d=%d status=%s objective=%.10g gap=%.2e iterations=%d (%.2fs)\n",
                  cfg.degree, to_string(sol.status), cert.objective, sol.gap, sol.iterations, seconds);
    log << line;
    return static_cast<int>(sol.status == SdpStatus::optimal ? kExitOk : kExitSolverNonOptimal);
  });
}

int cmd_validate(const CommandOptions& opts, std::ostream& log) {
  return guarded("validate", log, [&] {
    const auto [cfg, out] = load(opts);
    if (!cfg.distribution.sampleable()) {
      throw ConfigError("theta_distribution.kind", "moment_table distributions cannot be validated by sampling");
    }
    const Grid grid = state_grid(cfg);
    read_file(out / "solution_summary");
    const MultiPoly v = parse_poly(read_file(out / "v_poly"), cfg.problem.flow_space());

    std::vector<AlphaSet> estimates;
    for (double a : cfg.alphas) {
      AlphaSet set;
      set.alpha = a;
      set.grid = grid;
      try {
        set.membership = read_alpha_membership(read_file(out / alpha_file_name(a)), grid.size());
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error(alpha_file_name(a) + ": " + e.what());
      }
      set.intervals = member_intervals(grid, set.membership);
      estimates.push_back(std::move(set));
    }

    OracleOptions oo;
    oo.rk4_steps = cfg.rk4_steps;
    const EmpiricalField emp = empirical_confidence(cfg.problem, cfg.distribution, grid, cfg.samples, cfg.seed, oo);
    write_file(out / "empirical_field.csv", to_csv(emp));

    json reports = json::array();
    int total_violations = 0;
    for (const auto& est : estimates) {
      const double margin = binomial_margin(est.alpha, cfg.samples, cfg.stat_margin);
      const ContainmentReport rep = containment_report(est, emp, est.alpha, margin);
      total_violations += rep.violations;
      json pts = json::array();
      for (std::size_t i : rep.violating_points) pts.push_back(grid.points[i]);
      reports.push_back({{"alpha", est.alpha},
                         {"stat_margin", margin},
                         {"violations", rep.violations},
                         {"violating_points", pts},
                         {"estimate_area", rep.estimate_area},
                         {"empirical_area", rep.empirical_area},
                         {"excess_area", rep.excess_area},
                         {"pass", rep.pass()}});
    }

    // Liouville spot checks with the solved v along random trajectories.
    auto rng = make_stream(cfg.seed, kSpotCheckStream);
    const ThetaSampler sampler(cfg.distribution);
    json residuals = json::array();
    double max_res = 0.0;
    std::vector<double> x0(cfg.problem.nx()), theta(cfg.problem.ntheta());
    for (int k = 0; k < kLiouvilleTrajectories; ++k) {
      for (int i = 0; i < cfg.problem.nx(); ++i) {
        const auto& b = cfg.problem.state_box;
        x0[i] = b.lower(i) + (b.upper(i) - b.lower(i)) * uniform01(rng);
      }
      sampler.draw(rng, theta);
      const Trajectory traj = integrate_rk4(cfg.problem, x0, theta, cfg.rk4_steps);
      const double r = traj.blew_up ? std::numeric_limits<double>::infinity()
                                    : check_liouville_identity(traj, v, cfg.problem);
      max_res = std::max(max_res, r);
      residuals.push_back(r);
    }

    double max_exit = 0.0;
    for (double e : emp.exited_fraction) max_exit = std::max(max_exit, e);
    json report = {
        {"samples_per_point", cfg.samples},
        {"seed", cfg.seed},
        {"stat_margin_sigmas", cfg.stat_margin},
        {"rk4_steps", cfg.rk4_steps},
        {"max_exited_domain_fraction", max_exit},
        {"alpha_sets", reports},
        {"liouville", {{"trajectories", kLiouvilleTrajectories}, {"max_residual", max_res}, {"residuals", residuals}}},
        {"violations", total_violations},
        {"pass", total_violations == 0},
    };
    write_file(out / "containment_report", report.dump(2) + "\n");
    log << "validate: " << total_violations << " containment violation(s), max Liouville residual " << max_res
        << "\n";
    return static_cast<int>(total_violations == 0 ? kExitOk : kExitValidationFailure);
  });
}

}  // namespace confreach
