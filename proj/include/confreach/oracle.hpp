#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "confreach/distribution.hpp"
#include "confreach/poly.hpp"
#include "confreach/relax.hpp"
#include "confreach/sets.hpp"

namespace confreach {

/// Fixed-step RK4 solution x(t | x0, theta) on [0, T].
struct Trajectory {
  std::vector<double> theta;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  bool terminal_in_target = false;
  /// The state left X at some grid time before T.
  bool exited_domain = false;
  /// A non-finite state was produced; later states are NaN.
  bool blew_up = false;

  /// Reached X_T at T without leaving X and without blow-up.
  bool reaches() const { return terminal_in_target && !exited_domain && !blew_up; }
};

Trajectory integrate_rk4(const ProblemSpec& spec, std::span<const double> x0, std::span<const double> theta,
                         int steps);

/// Trapezoidal approximation of <mu(. | x0, theta), v> = int_0^T v(t, x(t), theta) dt.
double occupation_integral(const Trajectory& traj, const MultiPoly& v);

/// |v(T, x(T), theta) - v(0, x0, theta) - int_0^T (L_f v)(t, x(t), theta) dt|.
double check_liouville_identity(const Trajectory& traj, const MultiPoly& v, const ProblemSpec& spec);

/// Monte Carlo estimate of the reach probability on a grid of initial states.
struct EmpiricalField {
  Grid grid;
  std::vector<double> values;          // p_hat
  std::vector<double> half_width;      // binomial 95% half-width
  std::vector<double> exited_fraction; // fraction of samples that left X before T
  int samples_per_point = 0;
};

struct OracleOptions {
  int rk4_steps = 1000;
  /// 0 selects std::thread::hardware_concurrency().
  int threads = 0;
};

/// Throws std::invalid_argument for moment-table distributions (not sampleable).
EmpiricalField empirical_confidence(const ProblemSpec& spec, const ThetaDistribution& dist, const Grid& grid,
                                    int samples, std::uint64_t seed, const OracleOptions& opts = {});

/// Header `x1,...,xn,p_hat,half_width,n_samples,exited_domain_fraction`.
std::string to_csv(const EmpiricalField& field);

/// Parameter draws used by the Monte Carlo estimator; exposed for tests.
class ThetaSampler {
 public:
  explicit ThetaSampler(const ThetaDistribution& dist);
  void draw(std::mt19937_64& rng, std::span<double> out) const;

 private:
  const ThetaDistribution* dist_;
  std::vector<double> cumulative_;
};

/// Random stream keyed by (seed, index), so results do not depend on scheduling.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index);
/// Uniform [0, 1) from the top 53 bits; bit-reproducible across standard libraries.
double uniform01(std::mt19937_64& rng);

}  // namespace confreach
