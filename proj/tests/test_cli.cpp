#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "confreach/pipeline.hpp"

using namespace confreach;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("confreach_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// bundled drift config with a cheaper validation so the whole file runs in seconds
json drift_config() {
  json j = json::parse(slurp(fs::path(CONFREACH_SOURCE_DIR) / "configs" / "theta_drift.json"));
  j["relaxation"]["degree"] = 4;
  j["extraction"]["grid_resolution"] = 81;
  j["validation"]["samples"] = 300;
  j["validation"]["rk4_steps"] = 100;
  return j;
}

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

struct Run {
  int code;
  std::string log;
};

template <class Cmd>
Run run(Cmd cmd, const fs::path& config, const fs::path& out) {
  CommandOptions o;
  o.config_path = config.string();
  o.out_dir = out.string();
  std::ostringstream log;
  const int code = cmd(o, log);
  return {code, log.str()};
}

}  // namespace

TEST_CASE("solve writes every artifact") {
  const auto dir = scratch("solve");
  const auto cfg = write_config(dir, drift_config());
  const auto r = run(cmd_solve, cfg, dir / "out");
  CAPTURE(r.log);
  REQUIRE(r.code == kExitOk);
  for (const char* f : {"problem.dat-s", "solution_summary", "w_poly", "v_poly", "confidence_field.csv",
                        "alpha_set_0.2.csv", "alpha_set_0.5.csv"}) {
    CAPTURE(f);
    CHECK(fs::exists(dir / "out" / f));
  }
  const auto summary = json::parse(slurp(dir / "out" / "solution_summary"));
  CHECK(summary["status"] == "optimal");
  CHECK(summary["degree"] == 4);
  CHECK(summary["alpha_sets"].size() == 2);
  CHECK(summary["objective"].get<double>() >= 1.0);
}

TEST_CASE("configuration errors exit with code 1") {
  const auto dir = scratch("errors");
  {
    auto j = drift_config();
    j["relaxation"]["degree"] = 5;
    const auto r = run(cmd_solve, write_config(dir, j), dir / "out");
    CHECK(r.code == kExitConfigError);
    CHECK(r.log.find("relaxation.degree") != std::string::npos);
  }
  {
    auto j = drift_config();
    j["problem"]["target_box"] = json::parse("[[0.5, 0.5]]");
    const auto r = run(cmd_solve, write_config(dir, j), dir / "out");
    CHECK(r.code == kExitConfigError);
    CHECK(r.log.find("target_box") != std::string::npos);
  }
  {
    auto j = drift_config();
    j["validation"]["samples"] = 0;
    const auto r = run(cmd_validate, write_config(dir, j), dir / "out");
    CHECK(r.code == kExitConfigError);
    CHECK(r.log.find("validation.samples") != std::string::npos);
  }
  {
    auto j = drift_config();
    j["problem"]["dynamics"] = json::parse(R"(["theta1 + 2*x1^"])");
    const auto r = run(cmd_solve, write_config(dir, j), dir / "out");
    CHECK(r.code == kExitConfigError);
    CHECK(r.log.find("x1^") != std::string::npos);
  }
  {
    auto j = drift_config();
    j["solver"]["tolerance"] = 1e-6;
    const auto r = run(cmd_solve, write_config(dir, j), dir / "out");
    CHECK(r.code == kExitConfigError);
    CHECK(r.log.find("solver.tolerance") != std::string::npos);
  }
  {
    const auto r = run(cmd_validate, write_config(dir, drift_config()), dir / "empty");
    CHECK(r.code == kExitConfigError);
  }
  CHECK(run(cmd_solve, dir / "missing.json", dir / "out").code == kExitConfigError);
  CHECK_FALSE(fs::exists(dir / "out" / "solution_summary"));
}

TEST_CASE("validate passes on a fresh solve and fails on a tampered alpha set") {
  const auto dir = scratch("validate");
  const auto cfg = write_config(dir, drift_config());
  REQUIRE(run(cmd_solve, cfg, dir / "out").code == kExitOk);
  const auto ok = run(cmd_validate, cfg, dir / "out");
  CAPTURE(ok.log);
  CHECK(ok.code == kExitOk);
  const auto report = json::parse(slurp(dir / "out" / "containment_report"));
  CHECK(report["pass"] == true);
  CHECK(report["violations"] == 0);
  CHECK(report["liouville"]["max_residual"].get<double>() <= 1e-6);
  CHECK(fs::exists(dir / "out" / "empirical_field.csv"));

  // every trajectory from x = 0 reaches under the atom; dropping it from the set
  // must be caught regardless of sampling noise
  json atom = json::parse(slurp(fs::path(CONFREACH_SOURCE_DIR) / "configs" / "linear_decay_atom.json"));
  atom["relaxation"]["degree"] = 4;
  atom["extraction"]["grid_resolution"] = 81;
  atom["validation"]["samples"] = 50;
  atom["validation"]["rk4_steps"] = 100;
  const auto atom_dir = dir / "atom";
  fs::create_directories(atom_dir);
  const auto atom_cfg = write_config(atom_dir, atom);
  REQUIRE(run(cmd_solve, atom_cfg, atom_dir / "out").code == kExitOk);
  REQUIRE(run(cmd_validate, atom_cfg, atom_dir / "out").code == kExitOk);
  const auto set_path = atom_dir / "out" / "alpha_set_0.5.csv";
  std::string csv = slurp(set_path);
  const auto pos = csv.find("\n0,");
  REQUIRE(pos != std::string::npos);
  const auto eol = csv.find('\n', pos + 1);
  REQUIRE(csv[eol - 1] == '1');
  csv[eol - 1] = '0';
  std::ofstream(set_path, std::ios::binary) << csv;
  const auto bad = run(cmd_validate, atom_cfg, atom_dir / "out");
  CHECK(bad.code == kExitValidationFailure);
}

TEST_CASE("export is byte-identical across runs") {
  const auto dir = scratch("export");
  const auto cfg = write_config(dir, drift_config());
  REQUIRE(run(cmd_export, cfg, dir / "a").code == kExitOk);
  REQUIRE(run(cmd_export, cfg, dir / "b").code == kExitOk);
  const auto a = slurp(dir / "a" / "problem.dat-s");
  CHECK(a == slurp(dir / "b" / "problem.dat-s"));
  CHECK_FALSE(fs::exists(dir / "a" / "solution_summary"));
  // first line is the number of constraints
  std::istringstream in(a);
  long m = 0;
  in >> m;
  CHECK(m > 0);
}

TEST_CASE("solve and validate outputs are deterministic") {
  const auto dir = scratch("determinism");
  const auto cfg = write_config(dir, drift_config());
  for (const char* out : {"a", "b"}) {
    REQUIRE(run(cmd_solve, cfg, dir / out).code == kExitOk);
    REQUIRE(run(cmd_validate, cfg, dir / out).code == kExitOk);
  }
  for (const char* f : {"confidence_field.csv", "alpha_set_0.2.csv", "empirical_field.csv", "solution_summary",
                        "containment_report", "w_poly"}) {
    CAPTURE(f);
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
}

TEST_CASE("overrides") {
  const auto dir = scratch("overrides");
  const auto cfg = write_config(dir, drift_config());
  CommandOptions o;
  o.config_path = cfg.string();
  o.out_dir = (dir / "out").string();
  o.degree = 2;
  o.alphas = std::vector<double>{0.3};
  std::ostringstream log;
  REQUIRE(cmd_solve(o, log) == kExitOk);
  CHECK(fs::exists(dir / "out" / "alpha_set_0.3.csv"));
  CHECK_FALSE(fs::exists(dir / "out" / "alpha_set_0.2.csv"));
  CHECK(json::parse(slurp(dir / "out" / "solution_summary"))["degree"] == 2);
  o.degree = 3;
  CHECK(cmd_solve(o, log) == kExitConfigError);
  CHECK(alpha_file_name(0.25) == "alpha_set_0.25.csv");
}
