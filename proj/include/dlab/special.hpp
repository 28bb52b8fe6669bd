#pragma once

#include <span>
#include <vector>

#include "dlab/space.hpp"

namespace dlab {

/// ML_ell(x) = sum_k x^k / Gamma(1 + ell k) for ell in (0, 1], x >= 0.
/// Throws Error(range) when the sum overflows or needs more than 10^4 terms.
double mittag_leffler(double ell, double x);

/// log ML_ell(x), usable far past the overflow of mittag_leffler.
double log_mittag_leffler(double ell, double x);

struct MittagLefflerFit {
  double m = 0.0;       // max over the grid of ML_rho(x) / exp(x^(1/rho))
  double argmax = 0.0;
};

/// Smallest m with ML_rho(x) <= m exp(x^(1/rho)) on `points` evenly spaced x in [0, x_max].
MittagLefflerFit fit_mittag_leffler_constant(double rho, double x_max = 50.0, int points = 2001);

/// Decreasing rearrangement of a nonnegative function on a finite measure space.
struct RearrangedFunction {
  std::vector<double> values;      // strictly decreasing f*_i
  std::vector<double> cumulative;  // T_i, strictly increasing, T_0 = 0 implicit

  /// |{s : f*(s) > t}|
  double level_measure(double t) const;
  /// int f*(s) ds
  double integral() const;
};

/// Throws Error(domain) on negative values inside the support.
RearrangedFunction rearrange(std::span<const double> f, std::span<const double> measure,
                             std::span<const Vertex> support);

enum class LorentzSecond { one, weak };

/// ||f||_{p,1} = sum_i f*_i p (T_i^{1/p} - T_{i-1}^{1/p});
/// ||f||_{p,inf} = max_i f*_i T_i^{1/p}.
double lorentz_norm(const RearrangedFunction& f, double p, LorentzSecond q);

double lorentz_norm(std::span<const double> f, std::span<const double> measure, std::span<const Vertex> support,
                    double p, LorentzSecond q);

struct HolderCheck {
  double lhs = 0.0;  // sum f g mu
  double rhs = 0.0;  // ||f||_{p1,1} ||g||_{p2,inf}
  double ratio() const { return rhs > 0.0 ? lhs / rhs : 0.0; }
};

/// Throws Error(domain) unless 1/p1 + 1/p2 = 1 within 1e-12.
HolderCheck lorentz_holder_check(std::span<const double> f, std::span<const double> g,
                                 std::span<const double> measure, std::span<const Vertex> support, double p1,
                                 double p2);

/// 1 / (1 - c) for c in [0, 1).
double khasminskii_bound(double c);

}  // namespace dlab
