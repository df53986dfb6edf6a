#include "confreach/sets.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace confreach {

Box::Box(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty()) throw std::invalid_argument("box must have dimension >= 1");
  if (lower_.size() != upper_.size()) throw std::invalid_argument("box bound lengths differ");
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || !(lower_[i] < upper_[i])) {
      throw std::invalid_argument("degenerate box: dimension " + std::to_string(i) +
                                  " needs lower < upper");
    }
  }
}

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= upper_[i] - lower_[i];
  return v;
}

bool Box::contains(std::span<const double> z, double tol) const {
  if (static_cast<int>(z.size()) != dim()) throw std::invalid_argument("point dimension mismatch");
  for (int i = 0; i < dim(); ++i) {
    if (z[i] < lower_[i] - tol || z[i] > upper_[i] + tol) return false;
  }
  return true;
}

bool Box::contains(const Box& inner) const {
  if (inner.dim() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (inner.lower_[i] < lower_[i] || inner.upper_[i] > upper_[i]) return false;
  }
  return true;
}

Box Box::product(const Box& other) const {
  auto lo = lower_;
  auto hi = upper_;
  lo.insert(lo.end(), other.lower_.begin(), other.lower_.end());
  hi.insert(hi.end(), other.upper_.begin(), other.upper_.end());
  return Box(std::move(lo), std::move(hi));
}

Box Box::scaled_by(const Box& reference) const {
  if (reference.dim() != dim()) throw std::invalid_argument("box dimension mismatch");
  std::vector<double> lo(dim()), hi(dim());
  for (int i = 0; i < dim(); ++i) {
    lo[i] = (lower_[i] - reference.center(i)) / reference.half_width(i);
    hi[i] = (upper_[i] - reference.center(i)) / reference.half_width(i);
  }
  return Box(std::move(lo), std::move(hi));
}

bool SemialgebraicSet::contains(std::span<const double> z, double tol) const {
  for (const auto& g : inequalities) {
    if (g.evaluate(z) < -tol) return false;
  }
  return true;
}

SemialgebraicSet box_to_inequalities(const Box& b, VarSpace space, int first_var) {
  if (first_var < 0 || first_var + b.dim() > space.total()) {
    throw std::invalid_argument("box does not fit in variable space");
  }
  SemialgebraicSet set{space, {}};
  for (int i = 0; i < b.dim(); ++i) {
    const auto z = MultiPoly::variable(space, first_var + i);
    const auto upper = MultiPoly::constant(space, b.upper(i));
    const auto lower = MultiPoly::constant(space, b.lower(i));
    set.inequalities.push_back((upper - z) * (z - lower));
  }
  return set;
}

SemialgebraicSet box_to_inequalities(const Box& b) {
  return box_to_inequalities(b, VarSpace::x_only(b.dim()), 0);
}

double lebesgue_moment(const Box& b, std::span<const std::uint16_t> exponent) {
  if (static_cast<int>(exponent.size()) != b.dim()) {
    throw std::invalid_argument("moment exponent length does not match box dimension");
  }
  double m = 1.0;
  for (int i = 0; i < b.dim(); ++i) {
    const int p = exponent[i] + 1;
    double hi = 1.0, lo = 1.0;
    for (int k = 0; k < p; ++k) {
      hi *= b.upper(i);
      lo *= b.lower(i);
    }
    m *= (hi - lo) / p;
  }
  return m;
}

std::vector<double> moments_vector(const Box& b, int d) {
  const auto basis = basis_enumerate(b.dim(), d);
  std::vector<double> out;
  out.reserve(basis.size());
  for (const auto& e : basis.exponents) out.push_back(lebesgue_moment(b, e));
  return out;
}

AffineMap AffineMap::to_unit(const Box& b) {
  AffineMap m;
  for (int i = 0; i < b.dim(); ++i) {
    m.scale.push_back(b.half_width(i));
    m.offset.push_back(b.center(i));
  }
  return m;
}

std::vector<double> AffineMap::to_scaled(std::span<const double> z) const {
  std::vector<double> s(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) s[i] = (z[i] - offset[i]) / scale[i];
  return s;
}

std::vector<double> AffineMap::to_original(std::span<const double> s) const {
  std::vector<double> z(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) z[i] = offset[i] + scale[i] * s[i];
  return z;
}

AffineMap AffineMap::product(const AffineMap& other) const {
  AffineMap m = *this;
  m.scale.insert(m.scale.end(), other.scale.begin(), other.scale.end());
  m.offset.insert(m.offset.end(), other.offset.begin(), other.offset.end());
  return m;
}

double AffineMap::jacobian() const {
  double j = 1.0;
  for (double s : scale) j *= s;
  return j;
}

Grid Grid::lattice(const Box& box, const std::vector<int>& points_per_dim) {
  if (static_cast<int>(points_per_dim.size()) != box.dim()) {
    throw std::invalid_argument("lattice resolution must be given per dimension");
  }
  Grid g;
  g.shape = points_per_dim;
  g.cell_measure = 1.0;
  std::size_t total = 1;
  for (int i = 0; i < box.dim(); ++i) {
    if (points_per_dim[i] < 2) throw std::invalid_argument("lattice needs at least 2 points per dimension");
    total *= static_cast<std::size_t>(points_per_dim[i]);
    g.cell_measure *= (box.upper(i) - box.lower(i)) / (points_per_dim[i] - 1);
  }
  g.points.reserve(total);
  std::vector<int> idx(box.dim(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    std::vector<double> p(box.dim());
    for (int i = 0; i < box.dim(); ++i) {
      const int last = points_per_dim[i] - 1;
      p[i] = idx[i] == last ? box.upper(i)
                            : box.lower(i) + (box.upper(i) - box.lower(i)) * idx[i] / last;
    }
    g.points.push_back(std::move(p));
    for (int i = box.dim() - 1; i >= 0; --i) {
      if (++idx[i] < points_per_dim[i]) break;
      idx[i] = 0;
    }
  }
  return g;
}

Grid Grid::scattered(std::vector<std::vector<double>> points, double cell_measure) {
  Grid g;
  g.points = std::move(points);
  g.cell_measure = cell_measure;
  return g;
}

}  // namespace confreach
