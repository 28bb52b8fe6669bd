#pragma once

#include <span>
#include <vector>

#include "dlab/heatkernel.hpp"

namespace dlab {

/// T_t u = sum_n exp(-lambda_n t) (u, phi_n)_mu phi_n. Input and output are
/// functions on every vertex; the output vanishes off the domain.
std::vector<double> feynman_kac_apply(const GraphSpace& space, const GeneratorSpectrum& spec, double t,
                                      std::span<const double> u);

/// mu-weighted inner product over all vertices.
double inner_product(const GraphSpace& space, std::span<const double> f, std::span<const double> g);

struct ComponentGround {
  std::vector<Vertex> vertices;
  double lambda = 0.0;
  std::vector<double> phi;  // on every vertex, zero off the component
};

struct PrincipalEigen {
  double lambda0 = 0.0;
  std::vector<double> phi1;  // ground state of the lowest component, zero elsewhere
  bool degenerate = false;   // several components share lambda0
  std::vector<ComponentGround> components;
};

/// Bottom of the spectrum, computed component by component.
PrincipalEigen principal_eigenvalue(const GraphSpace& space, const DomainMask& domain,
                                    const PotentialField* potential = nullptr);

/// max over the domain of |((-Laplacian + V) u - lambda u)(x)|, divided by ||u||_inf.
double relative_residual(const GraphSpace& space, const DomainMask& domain, const PotentialField* potential,
                         std::span<const double> u, double lambda);

/// A designated eigenpair of -Laplacian + V on a domain.
struct EigenSolution {
  std::vector<double> u;
  double lambda = 0.0;
  double residual = 0.0;
};

EigenSolution eigen_solution(const GraphSpace& space, const GeneratorSpectrum& spec,
                             const PotentialField* potential, std::size_t index);

struct BallSpec {
  Vertex center;
  double r;
};

struct BallEigenvalue {
  BallSpec ball;
  double lambda;
  double product;  // lambda * F(r)
};

struct BallEigenReport {
  std::vector<BallEigenvalue> balls;
  double max_product = 0.0;
  double min_product = kInf;
  double spread() const { return max_product / min_product; }
};

/// Principal Dirichlet eigenvalue of each ball times F(r).
BallEigenReport eigenvalue_ball_bound(const GraphSpace& space, const std::vector<BallSpec>& balls);

/// lambda0(Omega) F(r) (mu(Omega) / mu(B))^nu for Omega inside B(center, r).
/// Throws Error(domain) when Omega leaves the ball.
double faber_krahn_functional(const GraphSpace& space, BallSpec ball, const DomainMask& omega, double nu);

/// Default nu = beta / alpha2.
double default_fk_exponent(const ScalingLaw& scaling);

/// Largest radius rho at which some ball B(z, rho) still carries a single
/// strict sign of u: max over z of the distance from z to the nearest vertex
/// where u vanishes or has the opposite sign. Since u vanishes off its domain
/// such balls automatically lie in the domain.
double same_sign_radius(const GraphSpace& space, std::span<const double> u);

/// Centres z of open balls B(z, rho) contained in the domain on which u keeps
/// one strict sign.
std::vector<Vertex> wavelength_violations(const GraphSpace& space, const DomainMask& domain,
                                          std::span<const double> u, double rho);

}  // namespace dlab
