#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dlab/heatkernel.hpp"
#include "dlab/linalg.hpp"

namespace dlab {

struct WalkConfig {
  std::uint64_t seed = 0;
  std::size_t n_paths = 1;
  std::size_t max_events = 10'000'000;  // per path
};

/// Counter-based stream: path k of seed s always draws the same numbers.
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t path);
  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Exp(1) variate; 1 - u is exact for a 53-bit u, so plain log is safe and cheaper than log1p.
  double unit_exponential() { return -std::log(1.0 - uniform()); }
  /// Exp(rate) holding time.
  double exponential(double rate) { return unit_exponential() / rate; }

 private:
  std::uint64_t state_;
};

/// Any combination of: exit from a domain, hitting a target set, fixed
/// horizon. An optional potential is integrated along the path.
struct StopRule {
  const DomainMask* domain = nullptr;
  const DomainMask* target = nullptr;
  double horizon = kInf;
  const PotentialField* potential = nullptr;
};

enum class StopReason { exited, hit, horizon, truncated };

struct PathRecord {
  double time = 0.0;
  Vertex terminal = 0;
  double integral = 0.0;  // sum of V(x) * holding time
  StopReason reason = StopReason::horizon;
};

/// Continuous-time walk with jump rate deg(x)/mu(x) and jump law c(x,y)/deg(x).
std::vector<PathRecord> simulate_paths(const GraphSpace& space, Vertex start, const StopRule& rule,
                                       const WalkConfig& cfg);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::size_t excluded = 0;  // truncated paths
};

/// Sample mean and standard error, accumulated in path order.
MeanEstimate summarize(const std::vector<double>& samples, std::size_t excluded = 0);

/// E_x tau_Omega on every vertex (zero off Omega). Throws Error(recurrence)
/// when Omega is the whole space.
std::vector<double> exact_mean_exit(const GraphSpace& space, const DomainMask& domain);

/// Survival function S(t)(x) = P_x(tau_Omega > t) (or the Feynman-Kac mass
/// with a potential), spectral on small domains and by uniformization above.
class SurvivalSolver {
 public:
  static constexpr std::size_t kSpectralLimit = 600;

  SurvivalSolver(const GraphSpace& space, const DomainMask& domain, const PotentialField* potential = nullptr);
  double survival(double t, Vertex x) const;
  std::vector<double> survival(double t) const;
  bool spectral() const { return spectrum_.has_value(); }
  const DomainMask& domain() const { return domain_; }

 private:
  const GraphSpace* space_;
  DomainMask domain_;
  std::optional<GeneratorSpectrum> spectrum_;
  Eigen::VectorXd coeff_;  // (1, phi_n)_mu
  std::optional<Uniformization> uniform_;
};

struct HittingProbability {
  double value = 0.0;
  bool degenerate = false;  // start already inside the target
};

/// P_o(hit K by time T) = 1 - [exp(-T H_{K^c}) 1](o).
HittingProbability exact_hitting_prob_by_time(const GraphSpace& space, const DomainMask& target, Vertex o,
                                              double T);

struct HittingEstimate {
  double probability = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  double deadline = 0.0;
};

HittingEstimate hitting_mc(const GraphSpace& space, const DomainMask& target, Vertex o, double T,
                           const WalkConfig& cfg);

struct MedianExit {
  double time = 0.0;           // right end of the final bracket
  double lower = 0.0;          // left end; P(tau <= lower) < 1/2
  double prob_at_time = 0.0;   // P(tau <= time) >= 1/2
  double prob_at_lower = 0.0;
  double quantum = 0.0;        // max jump rate times the bracket width
};

/// T(o) = inf{t : P_o(tau_Omega <= t) >= 1/2} by bisection on the exact
/// survival function, bracket width 1e-6 * 2 E_o tau.
MedianExit median_exit_time(const GraphSpace& space, const DomainMask& domain, Vertex o);

struct FeynmanKacEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  std::size_t truncated = 0;
};

/// E_x[exp(-int_0^t V(X_s) ds) u(X_t) 1{t < tau_Omega}] by simulation.
FeynmanKacEstimate feynman_kac_mc(const GraphSpace& space, const DomainMask& domain, const PotentialField& potential,
                                  const std::vector<double>& u, Vertex x, double t, const WalkConfig& cfg);

/// P_x(hit `target` before leaving `region`) on every vertex: 1 on the target,
/// 0 outside the region. region = whole space gives the reflecting version.
std::vector<double> hit_before_exit(const GraphSpace& space, const DomainMask& region, const DomainMask& target);

struct KhasminskiiCheck {
  double c = 0.0;             // sup_x E_x int_0^t V(X_s) ds
  double exp_moment = 0.0;    // sup_x E_x exp(int_0^t V(X_s) ds)
  double bound = 0.0;         // 1 / (1 - c), infinite when c >= 1
  bool holds = false;
};

/// Both sides from whole-space spectra; V >= 0.
KhasminskiiCheck khasminskii_check(const GraphSpace& space, const GeneratorSpectrum& whole,
                                   const PotentialField& potential, double t);

}  // namespace dlab
