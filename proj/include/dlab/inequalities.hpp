#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dlab/heatkernel.hpp"
#include "dlab/special.hpp"
#include "dlab/spectral.hpp"
#include "dlab/stochastic.hpp"

namespace dlab {

/// Slack for inequalities that hold exactly on every finite instance.
inline constexpr double kBoundSlack = 1e-9;

// ---------------------------------------------------------------- hitting

struct HittingCertificate {
  Vertex o = 0;
  std::vector<Vertex> K;
  double r = 0.0;
  double T = 0.0;
  double exact_prob = 0.0;
  double double_integral = 0.0;    // int int G_T(x,y) / G_T(o,y) dnu(y) dnu(x)
  double green_ratio_bound = 0.0;  // 1 / (2 * double_integral)
  double volume_ratio = 0.0;       // mu(K) / V(o, r)
  bool pass = false;               // green_ratio_bound <= exact_prob + slack
};

/// G_T from the whole-space spectrum (no potential), T = F(2r/eta). Throws
/// Error(instance) when o is in K or K leaves B(o, r).
HittingCertificate hitting_certificate(const GraphSpace& space, const GeneratorSpectrum& whole, Vertex o,
                                       const std::vector<Vertex>& K, double r, double eta = kDefaultEta);

/// C1 = min over certificates of exact_prob / volume_ratio, so that
/// C1 mu(K) / V(o, r) <= exact probability on every calibration instance.
double fit_hitting_constant(const std::vector<HittingCertificate>& certs);

/// Closed ball {d(o, y) <= r}.
DomainMask closed_ball(const GraphSpace& space, Vertex o, double r);

/// Interior of a lattice box: the vertices of full degree. Leaving it means
/// touching a face, which is where the walk is absorbed.
DomainMask box_interior(const GraphSpace& space);

struct FarHittingPoint {
  int extent = 0;
  double probability = 0.0;
};

struct FarHittingReport {
  std::vector<FarHittingPoint> sweep;  // growing ambient boxes
  double probability = 0.0;            // value at the largest box
  double relative_change = 0.0;        // between the last two boxes
  double rate = 0.0;                   // F(theta) / V(o, theta)
  double constant = 0.0;               // probability / rate
};

/// P_x(hit the closed ball of radius `ball_radius` at the centre before
/// touching the faces) for x at lattice offset `distance` along the first
/// axis, over lattice boxes of the given extents.
FarHittingReport hitting_far_bound(int dim, const std::vector<int>& extents, double ball_radius, int distance,
                                   double theta);

struct AnnulusHitting {
  double r = 0.0;
  double min_probability = 0.0;  // over x in B(o, 2r) minus the closed ball of radius r
};

/// Annulus version on a fixed box with absorbing faces.
std::vector<AnnulusHitting> annulus_hitting(const GraphSpace& box, Vertex o, const std::vector<double>& radii);

// ---------------------------------------------------------------- Lieb

enum class LiebRadius { sup_norm, lp_norm };

struct LiebCoverage {
  double kappa = 0.0;
  double r = 0.0;
  double coverage = 0.0;  // mu(Omega cap B(o, r)) / mu(B(o, r))
};

struct LiebReport {
  Vertex o = 0;
  double theta = 0.0;    // sup of V- on Omega
  double norm_p = 0.0;   // ||V-||_{p, Omega}
  double residual = 0.0;
  bool degenerate = false;  // V- vanishes: r is infinite
  std::vector<LiebCoverage> sweep;
};

/// o = argmax |u|. sup_norm radius (eta/2) R(kappa / theta); lp_norm radius
/// kappa ||V-||_p^(-1 / (beta rho)) with rho = 1 - alpha2 / (beta p).
LiebReport verify_lieb(const GraphSpace& space, const DomainMask& omega, const PotentialField& V,
                       const std::vector<double>& u, const std::vector<double>& kappas, LiebRadius variant,
                       double eta = kDefaultEta, double p = 2.0);

/// Largest kappa of the grid such that every instance reaches coverage
/// >= 1 - epsilon for that kappa and all smaller ones; 0 when none does.
double lieb_kappa_star(const std::vector<LiebReport>& reports, double epsilon);

// ---------------------------------------------------------------- Keller

struct KellerValues {
  double lambda = 0.0;        // principal eigenvalue of -Laplacian + V on Omega
  double norm_p = 0.0;        // ||V-||_{p, Omega}
  double measure = 0.0;       // mu(Omega)
  double product = 0.0;       // mu(Omega)^(beta/alpha - 1/p) ||V-||_p
  double eta = 0.0;           // 1 - alpha / (beta p)
  double moment_ratio = 0.0;  // |lambda|^eta / ||V-||_p when lambda <= 0, else 0
};

/// Throws Error(domain) unless p > max(alpha / beta, 1).
KellerValues keller_bounds(const GraphSpace& space, const DomainMask& omega, const PotentialField& V, double p);

/// Depth at which the principal eigenvalue of -Laplacian - depth 1_well on
/// Omega crosses zero, by bisection (relative tolerance 1e-12).
double critical_well_depth(const GraphSpace& space, const DomainMask& omega, const std::vector<Vertex>& well);

// ---------------------------------------------------------------- supersolutions

struct SupersolutionInstance {
  std::vector<double> u;
  const DomainMask* omega = nullptr;
  std::vector<double> V;  // empty: V = 0
  double p = 1.0;
  std::function<double(double)> f;  // empty: t -> t^p
};

struct SupersolutionVerdict {
  bool pass = true;
  std::vector<Vertex> violations;
  double scale = 0.0;
};

/// (-Laplacian u)(x) >= V(x) f(u(x)) - 1e-10 scale at every vertex of Omega.
SupersolutionVerdict check_supersolution(const GraphSpace& space, const SupersolutionInstance& inst);

struct ProfileRow {
  double r = 0.0;
  double M = 0.0;       // inf of u over B(o, r)
  double M2 = 0.0;      // inf over B(o, 2r)
  double kappa2 = 0.0;  // M / (1 wedge F(r) / V(o, r))
  double kappa3 = 0.0;  // M(r) / M(2r)
  double chain = 0.0;   // M^(p-1) F(r)
};

/// u must be superharmonic on `region`; throws Error(instance) otherwise.
std::vector<ProfileRow> liouville_profile(const GraphSpace& space, const DomainMask& region,
                                          const std::vector<double>& u, Vertex o, const std::vector<double>& radii,
                                          double p = 2.0);

struct PotentialProfileRow {
  double r = 0.0;
  double psi_inf = 0.0;  // inf over the annulus of Psi(x, r)
  double phi_kappa = 0.0;
  double ratio = 0.0;    // psi_inf / phi_kappa
  std::size_t annulus_points = 0;
};

/// Psi(x, r) = E_x int_0^tau V over B(x, r - 1); Phi_kappa(r) = inf over
/// the annulus {r/2 <= d(o, x) <= r} of (F(r) / V(o, r)) sum_{B(x, kappa r)} V mu.
/// `stride` > 1 evaluates Psi on every stride-th annulus vertex only.
std::vector<PotentialProfileRow> liouville_potential_profile(const GraphSpace& space, const PotentialField& V,
                                                             Vertex o, double kappa, const std::vector<double>& radii,
                                                             std::size_t stride = 1);

enum class OuterBoundary { absorbing, reflecting };

struct RecurrentRow {
  int extent = 0;
  double probability = 0.0;
};

struct RecurrentReport {
  std::vector<RecurrentRow> rows;
  bool increasing = false;
  double final_probability = 0.0;
};

/// Hitting probability of the closed centre ball from a vertex `distance`
/// steps away along the first axis, on lattice boxes of growing extent.
RecurrentReport recurrent_liouville_check(int dim, const std::vector<int>& extents, double ball_radius,
                                          int distance, OuterBoundary boundary);

// ---------------------------------------------------------------- local Faber-Krahn

struct LocalFkReport {
  Vertex o = 0;
  double u_ratio = 0.0;  // |u(o)| / ||u||_inf
  MedianExit median;
  double radius = 0.0;   // R(T(o))
  double p = 0.0;        // alpha1 / (alpha1 - alpha2 + beta)
  Vertex best_center = 0;
  double max_norm = 0.0; // max over balls of ||V-||_{p,1}(Omega cap B)
};

/// Throws Error(domain) when the exponent is not positive, Error(instance)
/// when V- vanishes on Omega (no nontrivial solution exists).
LocalFkReport local_fk_certificate(const GraphSpace& space, const DomainMask& omega, const PotentialField& V,
                                   const std::vector<double>& u);

}  // namespace dlab
