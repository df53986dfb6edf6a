#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "confreach/distribution.hpp"
#include "confreach/relax.hpp"
#include "confreach/sdp.hpp"

namespace confreach {

/// Raised for anything wrong with a run configuration. The message starts with
/// the dotted key that caused it.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  ProblemSpec problem;
  std::vector<std::string> dynamics_text;
  ThetaDistribution distribution;
  int degree = 0;
  SdpOptions solver;
  std::vector<double> alphas;
  int grid_resolution = 401;  // per state dimension
  int samples = 2000;
  std::uint64_t seed = 1;
  double stat_margin = 3.0;  // binomial standard deviations
  int rk4_steps = 1000;
  std::string output_dir;
};

/// Parses the JSON config text. Unknown keys, missing required keys and
/// ill-formed values throw ConfigError.
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::string& path);

/// Command-line overrides; validated with the same rules as the file.
void apply_degree_override(RunConfig& cfg, int degree);
void apply_alpha_override(RunConfig& cfg, const std::vector<double>& alphas);

/// Lattice over the state box at the configured resolution.
Grid state_grid(const RunConfig& cfg);

}  // namespace confreach
