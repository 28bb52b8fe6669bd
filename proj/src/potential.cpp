#include "dlab/potential.hpp"

#include <algorithm>
#include <cmath>

#include "dlab/error.hpp"

namespace dlab {

PotentialField::PotentialField(std::vector<double> values) : values_(std::move(values)) {
  negative_.resize(values_.size());
  for (std::size_t k = 0; k < values_.size(); ++k) {
    require(std::isfinite(values_[k]), ErrorKind::domain, "potential entries must be finite");
    negative_[k] = std::max(-values_[k], 0.0);
  }
}

double PotentialField::theta(const DomainMask& domain) const {
  double t = 0.0;
  for (Vertex x : domain.vertices()) t = std::max(t, negative_[x]);
  return t;
}

double PotentialField::negative_norm(const GraphSpace& space, const DomainMask& domain, double p) const {
  require(p > 0.0, ErrorKind::domain, "norm exponent must be positive");
  if (std::isinf(p)) return theta(domain);
  double s = 0.0;
  for (Vertex x : domain.vertices()) s += std::pow(negative_[x], p) * space.measure(x);
  return std::pow(s, 1.0 / p);
}

PotentialField PotentialField::shifted(double c) const {
  std::vector<double> v = values_;
  for (double& x : v) x += c;
  return PotentialField(std::move(v));
}

}  // namespace dlab
