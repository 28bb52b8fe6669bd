#include "dlab/special.hpp"

#include <algorithm>
#include <cmath>

#include "dlab/error.hpp"

namespace dlab {

namespace {

constexpr int kMaxTerms = 10000;

void check_ml_args(double ell, double x) {
  require(ell > 0.0 && ell <= 1.0, ErrorKind::domain, "Mittag-Leffler index must lie in (0, 1]");
  require(x >= 0.0 && std::isfinite(x), ErrorKind::domain, "Mittag-Leffler argument must be finite and >= 0");
}

double log_term(double ell, double x, int k) {
  return k * std::log(x) - std::lgamma(1.0 + ell * k);
}

}  // namespace

double mittag_leffler(double ell, double x) {
  check_ml_args(ell, x);
  if (x == 0.0) return 1.0;
  double sum = 0.0, prev = 0.0;
  for (int k = 0; k < kMaxTerms; ++k) {
    const double a = 1.0 + ell * k;
    // direct form only while x^k and Gamma stay finite
    const bool direct = a < 170.0 && k * std::log(x) < 700.0;
    const double term = direct ? std::pow(x, k) / std::tgamma(a) : std::exp(log_term(ell, x, k));
    sum += term;
    if (!std::isfinite(sum)) fail(ErrorKind::range, "Mittag-Leffler sum overflows; use log_mittag_leffler");
    if (k > 0 && term <= prev && term < 1e-16 * sum) return sum;
    prev = term;
  }
  fail(ErrorKind::range, "Mittag-Leffler series did not converge within 10^4 terms");
}

double log_mittag_leffler(double ell, double x) {
  check_ml_args(ell, x);
  if (x == 0.0) return 0.0;
  std::vector<double> logs;
  double peak = -kInf;
  for (int k = 0; k < kMaxTerms; ++k) {
    const double lt = log_term(ell, x, k);
    logs.push_back(lt);
    peak = std::max(peak, lt);
    if (k > 0 && lt <= logs[static_cast<std::size_t>(k - 1)] && lt < peak - 37.0 - std::log(k + 1.0)) {
      double s = 0.0;
      for (double l : logs) s += std::exp(l - peak);
      return peak + std::log(s);
    }
  }
  fail(ErrorKind::range, "Mittag-Leffler series did not converge within 10^4 terms");
}

MittagLefflerFit fit_mittag_leffler_constant(double rho, double x_max, int points) {
  require(points >= 2 && x_max > 0.0, ErrorKind::domain, "fit grid needs two points and x_max > 0");
  MittagLefflerFit fit;
  fit.m = -kInf;
  for (int i = 0; i < points; ++i) {
    const double x = x_max * i / (points - 1);
    const double v = std::exp(log_mittag_leffler(rho, x) - std::pow(x, 1.0 / rho));
    if (v > fit.m) {
      fit.m = v;
      fit.argmax = x;
    }
  }
  return fit;
}

double RearrangedFunction::level_measure(double t) const {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size() && values[i] > t; ++i) m = cumulative[i];
  return m;
}

double RearrangedFunction::integral() const {
  double s = 0.0, last = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s += values[i] * (cumulative[i] - last);
    last = cumulative[i];
  }
  return s;
}

RearrangedFunction rearrange(std::span<const double> f, std::span<const double> measure,
                             std::span<const Vertex> support) {
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(support.size());
  for (Vertex x : support) {
    require(x < f.size() && x < measure.size(), ErrorKind::domain, "support vertex out of range");
    require(f[x] >= 0.0, ErrorKind::domain, "rearrangement needs a nonnegative function");
    atoms.emplace_back(f[x], measure[x]);
  }
  std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  RearrangedFunction out;
  double acc = 0.0;
  for (const auto& [v, m] : atoms) {
    acc += m;
    if (!out.values.empty() && out.values.back() == v) {
      out.cumulative.back() = acc;
    } else {
      out.values.push_back(v);
      out.cumulative.push_back(acc);
    }
  }
  return out;
}

double lorentz_norm(const RearrangedFunction& f, double p, LorentzSecond q) {
  require(p > 0.0, ErrorKind::domain, "Lorentz exponent must be positive");
  double s = 0.0, last = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double cur = std::pow(f.cumulative[i], 1.0 / p);
    if (q == LorentzSecond::one) {
      s += f.values[i] * p * (cur - last);
    } else {
      s = std::max(s, f.values[i] * cur);
    }
    last = cur;
  }
  return s;
}

double lorentz_norm(std::span<const double> f, std::span<const double> measure, std::span<const Vertex> support,
                    double p, LorentzSecond q) {
  require(p > 0.0, ErrorKind::domain, "Lorentz exponent must be positive");
  return lorentz_norm(rearrange(f, measure, support), p, q);
}

HolderCheck lorentz_holder_check(std::span<const double> f, std::span<const double> g,
                                 std::span<const double> measure, std::span<const Vertex> support, double p1,
                                 double p2) {
  require(p1 > 0.0 && p2 > 0.0 && std::abs(1.0 / p1 + 1.0 / p2 - 1.0) <= 1e-12, ErrorKind::domain,
          "Hoelder exponents must satisfy 1/p1 + 1/p2 = 1");
  HolderCheck h;
  for (Vertex x : support) {
    require(f[x] >= 0.0 && g[x] >= 0.0, ErrorKind::domain, "Hoelder check needs nonnegative functions");
    h.lhs += f[x] * g[x] * measure[x];
  }
  h.rhs = lorentz_norm(f, measure, support, p1, LorentzSecond::one) *
          lorentz_norm(g, measure, support, p2, LorentzSecond::weak);
  return h;
}

double khasminskii_bound(double c) {
  require(c >= 0.0 && c < 1.0, ErrorKind::domain, "Khasminskii bound needs c in [0, 1)");
  return 1.0 / (1.0 - c);
}

}  // namespace dlab
