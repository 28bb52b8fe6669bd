#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dlab/potential.hpp"
#include "dlab/space.hpp"

namespace dlab {

/// Largest domain decomposed densely; larger domains are refused.
inline constexpr std::size_t kMaxDenseDomain = 3000;

/// Default near-diagonal parameter eta when no envelope fit has been run.
inline constexpr double kDefaultEta = 0.25;

/// Full eigendecomposition of the Schroedinger-Dirichlet generator
/// (-Laplacian + V) on a domain. Modes are mu-orthonormal, eigenvalues
/// ascending, and each mode is sign-normalised so that its largest-magnitude
/// entry is positive.
class GeneratorSpectrum {
 public:
  GeneratorSpectrum(DomainMask domain, Eigen::VectorXd eigenvalues, Eigen::MatrixXd modes);

  const DomainMask& domain() const { return domain_; }
  std::size_t size() const { return static_cast<std::size_t>(eigenvalues_.size()); }
  double eigenvalue(std::size_t n) const { return eigenvalues_[static_cast<Eigen::Index>(n)]; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  /// Rows indexed by domain-local position, one column per mode.
  const Eigen::MatrixXd& modes() const { return modes_; }
  /// phi_n(x); zero off the domain.
  double mode(std::size_t n, Vertex x) const;
  /// phi_n as a function on every vertex of the space.
  std::vector<double> mode_function(std::size_t n) const;
  /// True when the bottom eigenvalue is (numerically) repeated.
  bool ground_degenerate() const;

 private:
  DomainMask domain_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd modes_;
};

/// Throws Error(size) above kMaxDenseDomain vertices, Error(numeric) when the
/// eigensolver fails.
GeneratorSpectrum assemble_generator(const GraphSpace& space, const DomainMask& domain,
                                     const PotentialField* potential = nullptr);

/// p_t(x, y) = sum_n exp(-lambda_n t) phi_n(x) phi_n(y); x, y in the domain.
double heat_kernel(const GeneratorSpectrum& spec, double t, Vertex x, Vertex y);

/// Heat kernel on the whole domain (domain-local indexing).
Eigen::MatrixXd heat_kernel_matrix(const GeneratorSpectrum& spec, double t);

/// G(x, y) = sum lambda_n^-1 phi_n(x) phi_n(y). Throws Error(recurrence) when
/// lambda_1 vanishes.
double green(const GeneratorSpectrum& spec, Vertex x, Vertex y);

/// G_T(x, y) = sum lambda_n^-1 (1 - exp(-lambda_n T)) phi_n(x) phi_n(y), with
/// the lambda -> 0 limit T.
double green_truncated(const GeneratorSpectrum& spec, double T, Vertex x, Vertex y);

/// G_T on rows xs and columns ys.
Eigen::MatrixXd green_truncated_block(const GeneratorSpectrum& spec, double T,
                                      const std::vector<Vertex>& xs, const std::vector<Vertex>& ys);

/// T = F(eta' r) with eta' = 2 / eta.
double truncation_time(const ScalingLaw& scaling, double r, double eta = kDefaultEta);

/// Phi(s) = sup_{r>0} (s/r - 1/F(r)) in closed form for F(r) = r^beta.
double phi(const ScalingLaw& scaling, double s);

/// The same supremum from 10^4 log-spaced radii in [1e-8, 1e8] followed by
/// Newton refinement at the best grid point.
double phi_grid_sup(const ScalingLaw& scaling, double s);

struct KernelSample {
  double t;
  Vertex x;
  Vertex y;
};

/// Upper estimate p <= C / V(x, R(t)) exp(-(t/2) Phi(c d / t)) and near-diagonal
/// lower estimate p >= c' / V(x, R(t)) for d <= eta R(t).
struct HeatKernelEnvelope {
  double C_ue = 0.0;
  double c_ue = 0.0;
  double c_nle = 0.0;
  double eta = kDefaultEta;
  bool fitted = false;
  std::vector<KernelSample> failures;
};

struct EnvelopeFitOptions {
  /// Largest decay constant c whose C stays within this factor of the c -> 0 optimum.
  double decay_budget = 2.0;
  /// Largest eta whose c' stays within this factor of the smallest-eta value.
  double nle_budget = 0.5;
};

/// Fits envelope constants against a whole-space, potential-free spectrum.
/// Throws Error(sampling) with fewer than 10 samples.
HeatKernelEnvelope fit_envelope(const GraphSpace& space, const GeneratorSpectrum& spec,
                                const std::vector<KernelSample>& samples,
                                const EnvelopeFitOptions& options = {});

/// Upper envelope value at (t, x, y).
double envelope_upper(const GraphSpace& space, const HeatKernelEnvelope& env, double t, Vertex x, Vertex y);

struct HarnackEstimate {
  double constant = 1.0;          // max over samples of max/min on the half ball
  std::vector<double> ratios;     // per boundary sample
  std::vector<Vertex> boundary;   // vertex order expected for boundary data
};

/// Boundary vertices of B(center, r), in the order check_harnack expects.
std::vector<Vertex> harnack_boundary(const GraphSpace& space, Vertex center, double r);

/// Harmonic extension of each nonnegative boundary data vector into
/// B(center, r) by an exact solve, then max/min over B(center, r/2).
/// Throws Error(geometry) when the ball has fewer than two vertices.
HarnackEstimate check_harnack(const GraphSpace& space, Vertex center, double r,
                              const std::vector<std::vector<double>>& boundary_data);

struct GreenPairSample {
  Vertex x;
  Vertex y;
  double r;
};

struct GreenBallSample {
  Vertex x;
  double r;
};

/// inf over samples (d(x,y) <= r) of G_T(x,y) V(x,r) / F(r), T = F(eta' r).
double green_lower_ratio(const GraphSpace& space, const GeneratorSpectrum& whole,
                         const std::vector<GreenPairSample>& samples, double eta = kDefaultEta);

/// Per sample: sup_{z in B(x,r)} sum_{y in B(x,r)} G_T(z,y) mu(y) / F(r).
std::vector<double> green_ball_mass_ratios(const GraphSpace& space, const GeneratorSpectrum& whole,
                                           const std::vector<GreenBallSample>& samples,
                                           double eta = kDefaultEta);

struct Band {
  double min = kInf;
  double max = -kInf;
  void add(double v) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  double spread() const { return max / min; }
};

/// Band of G_T(x,y) / (log(r / d(x,y)) + 1) over samples with 0 < d <= r.
Band log_green_band(const GraphSpace& space, const GeneratorSpectrum& whole,
                    const std::vector<GreenPairSample>& samples, double eta = kDefaultEta);

}  // namespace dlab
