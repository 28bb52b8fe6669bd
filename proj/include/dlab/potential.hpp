#pragma once

#include <vector>

#include "dlab/space.hpp"

namespace dlab {

/// Real potential V on the vertices, with its negative part V- = max(-V, 0)
/// cached.
class PotentialField {
 public:
  PotentialField() = default;
  /// Throws Error(domain) on non-finite entries.
  explicit PotentialField(std::vector<double> values);

  static PotentialField zero(std::size_t n) { return PotentialField(std::vector<double>(n, 0.0)); }
  static PotentialField constant(std::size_t n, double v) { return PotentialField(std::vector<double>(n, v)); }

  std::size_t size() const { return values_.size(); }
  double operator[](Vertex x) const { return values_[x]; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& negative_part() const { return negative_; }

  /// Theta = sup of V- over the domain.
  double theta(const DomainMask& domain) const;
  /// ||V-||_{p, domain} with respect to mu.
  double negative_norm(const GraphSpace& space, const DomainMask& domain, double p) const;

  PotentialField shifted(double c) const;

 private:
  std::vector<double> values_;
  std::vector<double> negative_;
};

}  // namespace dlab
