#include "confreach/distribution.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace confreach {

ThetaDistribution ThetaDistribution::uniform(Box box) {
  ThetaDistribution d;
  d.kind_ = Kind::uniform_box;
  d.dim_ = box.dim();
  d.box_ = std::move(box);
  return d;
}

ThetaDistribution ThetaDistribution::atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("discrete distribution needs at least one atom");
  const auto dim = atoms.front().point.size();
  if (dim == 0) throw std::invalid_argument("atom points must have dimension >= 1");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (a.point.size() != dim) throw std::invalid_argument("atom dimensions differ");
    if (!(a.weight >= 0.0)) throw std::invalid_argument("atom weights must be nonnegative");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("atom weights must sum to 1 (got " + std::to_string(total) + ")");
  }
  ThetaDistribution d;
  d.kind_ = Kind::discrete_atoms;
  d.dim_ = static_cast<int>(dim);
  d.atoms_ = std::move(atoms);
  return d;
}

ThetaDistribution ThetaDistribution::table(int dim, int max_degree, std::map<Exponent, double> moments) {
  if (dim < 1 || max_degree < 0) throw std::invalid_argument("moment table needs dim >= 1, degree >= 0");
  for (const auto& [e, v] : moments) {
    if (static_cast<int>(e.size()) != dim) throw std::invalid_argument("moment table exponent length mismatch");
    if (total_degree(e) > max_degree) throw std::invalid_argument("moment table entry exceeds declared degree");
  }
  auto zero = moments.find(Exponent(dim, 0));
  if (zero == moments.end() || std::abs(zero->second - 1.0) > 1e-12) {
    throw std::invalid_argument("moment table must have zeroth moment 1");
  }
  ThetaDistribution d;
  d.kind_ = Kind::moment_table;
  d.dim_ = dim;
  d.max_degree_ = max_degree;
  d.table_ = std::move(moments);
  return d;
}

double ThetaDistribution::moment(std::span<const std::uint16_t> exponent) const {
  if (static_cast<int>(exponent.size()) != dim_) throw std::invalid_argument("moment exponent length mismatch");
  switch (kind_) {
    case Kind::uniform_box:
      return lebesgue_moment(*box_, exponent) / box_->volume();
    case Kind::discrete_atoms: {
      double sum = 0.0;
      for (const auto& a : atoms_) {
        double term = a.weight;
        for (int i = 0; i < dim_; ++i) {
          for (int k = 0; k < exponent[i]; ++k) term *= a.point[i];
        }
        sum += term;
      }
      return sum;
    }
    case Kind::moment_table: {
      const Exponent e(exponent.begin(), exponent.end());
      if (total_degree(e) > max_degree_) {
        throw std::invalid_argument("moment degree " + std::to_string(total_degree(e)) +
                                    " exceeds table degree " + std::to_string(max_degree_));
      }
      auto it = table_.find(e);
      if (it == table_.end()) throw std::invalid_argument("moment table has no entry for requested exponent");
      return it->second;
    }
  }
  throw std::logic_error("unknown distribution kind");
}

double theta_moment(const ThetaDistribution& dist, std::span<const std::uint16_t> exponent) {
  return dist.moment(exponent);
}

MultiPoly marginalize_w(const MultiPoly& w, const ThetaDistribution& dist) {
  const VarSpace& s = w.space();
  if (s.nt != 0) throw std::invalid_argument("w must not depend on time");
  if (s.ntheta != dist.dim()) throw std::invalid_argument("parameter dimension does not match distribution");
  if (dist.max_degree() >= 0 && w.degree_in(s.nx, s.ntheta) > dist.max_degree()) {
    throw std::invalid_argument("insufficient moment-table degree for w");
  }
  const VarSpace out_space = VarSpace::x_only(s.nx);
  std::vector<std::pair<Exponent, double>> terms;
  terms.reserve(w.size());
  for (const auto& [e, c] : w.terms()) {
    const std::span<const std::uint16_t> theta_part(e.data() + s.nx, s.ntheta);
    terms.emplace_back(Exponent(e.begin(), e.begin() + s.nx), c * dist.moment(theta_part));
  }
  return MultiPoly(out_space, terms);
}

}  // namespace confreach
