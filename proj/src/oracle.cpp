#include "confreach/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <thread>

namespace confreach {

namespace {

// Integrates one trajectory; `visit(k, t, x)` sees every grid state.
class Rk4 {
 public:
  explicit Rk4(const ProblemSpec& spec) : spec_(spec), nx_(spec.nx()), nth_(spec.ntheta()) {
    for (const auto& f : spec.dynamics) field_.emplace_back(f);
    z_.resize(1 + nx_ + nth_);
    k_.assign(4, std::vector<double>(nx_));
  }

  struct Outcome {
    bool in_target = false;
    bool exited = false;
    bool blew_up = false;
  };

  template <class Visit>
  Outcome run(std::span<const double> x0, std::span<const double> theta, int steps, std::vector<double>& x,
              Visit&& visit) {
    if (steps < 1) throw std::invalid_argument("RK4 needs at least one step");
    if (static_cast<int>(x0.size()) != nx_ || static_cast<int>(theta.size()) != nth_) {
      throw std::invalid_argument("initial condition dimension mismatch");
    }
    const double T = spec_.horizon;
    const double h = T / steps;
    x.assign(x0.begin(), x0.end());
    std::copy(theta.begin(), theta.end(), z_.begin() + 1 + nx_);
    Outcome out;
    visit(0, 0.0, x);
    for (int s = 0; s < steps; ++s) {
      const double t = T * s / steps;
      eval(t, x, 0.0, nullptr, k_[0]);
      eval(t + 0.5 * h, x, 0.5 * h, &k_[0], k_[1]);
      eval(t + 0.5 * h, x, 0.5 * h, &k_[1], k_[2]);
      eval(t + h, x, h, &k_[2], k_[3]);
      bool finite = true;
      for (int i = 0; i < nx_; ++i) {
        x[i] += h / 6.0 * (k_[0][i] + 2.0 * k_[1][i] + 2.0 * k_[2][i] + k_[3][i]);
        finite = finite && std::isfinite(x[i]);
      }
      const double tn = (s + 1 == steps) ? T : T * (s + 1) / steps;
      if (!finite) {
        out.blew_up = true;
        return out;
      }
      if (!spec_.state_box.contains(x)) out.exited = true;
      visit(s + 1, tn, x);
    }
    out.in_target = spec_.target_box.contains(x);
    return out;
  }

 private:
  void eval(double t, const std::vector<double>& x, double a, const std::vector<double>* k,
            std::vector<double>& out) {
    z_[0] = t;
    for (int i = 0; i < nx_; ++i) z_[1 + i] = k ? x[i] + a * (*k)[i] : x[i];
    for (int i = 0; i < nx_; ++i) out[i] = field_[i](z_);
  }

  const ProblemSpec& spec_;
  int nx_;
  int nth_;
  std::vector<PolyEvaluator> field_;
  std::vector<double> z_;
  std::vector<std::vector<double>> k_;
};

}  // namespace

Trajectory integrate_rk4(const ProblemSpec& spec, std::span<const double> x0, std::span<const double> theta,
                         int steps) {
  spec.validate();
  Trajectory traj;
  traj.theta.assign(theta.begin(), theta.end());
  Rk4 rk(spec);
  std::vector<double> x;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  const auto out = rk.run(x0, theta, steps, x, [&](int, double t, const std::vector<double>& state) {
    traj.times.push_back(t);
    traj.states.push_back(state);
  });
  if (out.blew_up) {
    const std::vector<double> nan(spec.nx(), std::numeric_limits<double>::quiet_NaN());
    for (int s = static_cast<int>(traj.times.size()); s <= steps; ++s) {
      traj.times.push_back(s == steps ? spec.horizon : spec.horizon * s / steps);
      traj.states.push_back(nan);
    }
  }
  traj.terminal_in_target = out.in_target;
  traj.exited_domain = out.exited;
  traj.blew_up = out.blew_up;
  return traj;
}

double occupation_integral(const Trajectory& traj, const MultiPoly& v) {
  const VarSpace& s = v.space();
  const std::size_t nx = traj.states.empty() ? 0 : traj.states.front().size();
  if (s.nt != 1 || s.nx != static_cast<int>(nx) || s.ntheta != static_cast<int>(traj.theta.size())) {
    throw std::invalid_argument("test function does not match trajectory dimensions");
  }
  const PolyEvaluator ev(v);
  std::vector<double> z(s.total());
  std::copy(traj.theta.begin(), traj.theta.end(), z.begin() + 1 + nx);
  auto value_at = [&](std::size_t k) {
    z[0] = traj.times[k];
    std::copy(traj.states[k].begin(), traj.states[k].end(), z.begin() + 1);
    return ev(z);
  };
  double sum = 0.0;
  double prev = value_at(0);
  for (std::size_t k = 1; k < traj.times.size(); ++k) {
    const double cur = value_at(k);
    sum += 0.5 * (traj.times[k] - traj.times[k - 1]) * (prev + cur);
    prev = cur;
  }
  return sum;
}

double check_liouville_identity(const Trajectory& traj, const MultiPoly& v, const ProblemSpec& spec) {
  const MultiPoly lv = lie_derivative(v, spec.dynamics);
  std::vector<double> z0{0.0}, zT{traj.times.back()};
  z0.insert(z0.end(), traj.states.front().begin(), traj.states.front().end());
  zT.insert(zT.end(), traj.states.back().begin(), traj.states.back().end());
  z0.insert(z0.end(), traj.theta.begin(), traj.theta.end());
  zT.insert(zT.end(), traj.theta.begin(), traj.theta.end());
  return std::abs(v.evaluate(zT) - v.evaluate(z0) - occupation_integral(traj, lv));
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

ThetaSampler::ThetaSampler(const ThetaDistribution& dist) : dist_(&dist) {
  if (!dist.sampleable()) throw std::invalid_argument("moment-table distributions cannot be sampled");
  double acc = 0.0;
  for (const auto& a : dist.atom_list()) {
    acc += a.weight;
    cumulative_.push_back(acc);
  }
}

void ThetaSampler::draw(std::mt19937_64& rng, std::span<double> out) const {
  if (dist_->kind() == ThetaDistribution::Kind::uniform_box) {
    const Box& b = *dist_->box();
    for (int i = 0; i < b.dim(); ++i) out[i] = b.lower(i) + (b.upper(i) - b.lower(i)) * uniform01(rng);
    return;
  }
  const double u = uniform01(rng) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  const auto& p = dist_->atom_list()[idx].point;
  std::copy(p.begin(), p.end(), out.begin());
}

EmpiricalField empirical_confidence(const ProblemSpec& spec, const ThetaDistribution& dist, const Grid& grid,
                                    int samples, std::uint64_t seed, const OracleOptions& opts) {
  spec.validate();
  if (samples < 1) throw std::invalid_argument("empirical confidence needs samples >= 1");
  if (dist.dim() != spec.ntheta()) throw std::invalid_argument("distribution dimension does not match Theta");
  const ThetaSampler sampler(dist);
  for (const auto& p : grid.points) {
    if (static_cast<int>(p.size()) != spec.nx()) throw std::invalid_argument("grid dimension does not match X");
  }

  EmpiricalField field;
  field.grid = grid;
  field.samples_per_point = samples;
  const std::size_t n = grid.size();
  field.values.assign(n, 0.0);
  field.half_width.assign(n, 0.0);
  field.exited_fraction.assign(n, 0.0);

  auto work = [&](std::size_t begin, std::size_t end) {
    Rk4 rk(spec);
    std::vector<double> theta(spec.ntheta()), x;
    auto noop = [](int, double, const std::vector<double>&) {};
    for (std::size_t p = begin; p < end; ++p) {
      auto rng = make_stream(seed, p);
      int hits = 0, exits = 0;
      for (int s = 0; s < samples; ++s) {
        sampler.draw(rng, theta);
        const auto out = rk.run(grid.points[p], theta, opts.rk4_steps, x, noop);
        if (out.exited) ++exits;
        if (out.in_target && !out.exited && !out.blew_up) ++hits;
      }
      const double ph = static_cast<double>(hits) / samples;
      field.values[p] = ph;
      field.half_width[p] = 1.96 * std::sqrt(ph * (1.0 - ph) / samples);
      field.exited_fraction[p] = static_cast<double>(exits) / samples;
    }
  };

  unsigned threads = opts.threads > 0 ? static_cast<unsigned>(opts.threads) : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk, e = std::min(n, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return field;
}

std::string to_csv(const EmpiricalField& field) {
  std::string out;
  const int nx = field.grid.dim();
  for (int i = 0; i < nx; ++i) out += "x" + std::to_string(i + 1) + ",";
  out += "p_hat,half_width,n_samples,exited_domain_fraction\n";
  char buf[64];
  for (std::size_t p = 0; p < field.grid.size(); ++p) {
    for (int i = 0; i < nx; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,", field.grid.points[p][i]);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g,", field.values[p]);
    out += buf;
    std::snprintf(buf, sizeof buf, "%.17g,", field.half_width[p]);
    out += buf;
    out += std::to_string(field.samples_per_point) + ",";
    std::snprintf(buf, sizeof buf, "%.17g\n", field.exited_fraction[p]);
    out += buf;
  }
  return out;
}

}  // namespace confreach
