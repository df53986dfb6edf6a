#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "confreach/poly.hpp"
#include "confreach/sets.hpp"

namespace confreach {

/// Probability distribution of the uncertain parameters, accessed through its
/// moments. Construction rejects anything that is not a probability measure.
class ThetaDistribution {
 public:
  enum class Kind { uniform_box, discrete_atoms, moment_table };

  struct Atom {
    std::vector<double> point;
    double weight = 0.0;
  };

  static ThetaDistribution uniform(Box box);
  static ThetaDistribution atoms(std::vector<Atom> atoms);
  /// `moments` must contain the zero exponent with value 1.
  static ThetaDistribution table(int dim, int max_degree, std::map<Exponent, double> moments);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  /// Highest moment degree available; -1 means unbounded.
  int max_degree() const { return max_degree_; }
  bool sampleable() const { return kind_ != Kind::moment_table; }

  const std::optional<Box>& box() const { return box_; }
  const std::vector<Atom>& atom_list() const { return atoms_; }

  double moment(std::span<const std::uint16_t> exponent) const;

 private:
  ThetaDistribution() = default;

  Kind kind_ = Kind::uniform_box;
  int dim_ = 0;
  int max_degree_ = -1;
  std::optional<Box> box_;
  std::vector<Atom> atoms_;
  std::map<Exponent, double> table_;
};

double theta_moment(const ThetaDistribution& dist, std::span<const std::uint16_t> exponent);

/// F(x) = integral of w(x, theta) d mu_theta, exact for polynomial w. The result
/// lives in the x-only space.
MultiPoly marginalize_w(const MultiPoly& w, const ThetaDistribution& dist);

}  // namespace confreach
