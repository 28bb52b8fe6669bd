#pragma once

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <span>
#include <vector>

#include "dlab/potential.hpp"
#include "dlab/space.hpp"

namespace dlab {

/// (-Laplacian f)(x) = mu(x)^-1 sum_y c(x,y) (f(x) - f(y)) at every vertex.
std::vector<double> negative_laplacian(const GraphSpace& space, std::span<const double> f);

/// Symmetric energy matrix A = (Deg - C + diag(mu V)) restricted to the
/// domain, in domain-local indexing. The killed generator is M^-1 A.
Eigen::SparseMatrix<double> energy_matrix(const GraphSpace& space, const DomainMask& domain,
                                          const PotentialField* potential = nullptr);

/// Dense M^-1/2 A M^-1/2 on the domain.
Eigen::MatrixXd symmetrized_generator(const GraphSpace& space, const DomainMask& domain,
                                      const PotentialField* potential = nullptr);

/// Solver for the energy matrix of a killed domain: sparse LDL^T, or
/// conjugate gradients to a 1e-14 relative residual for large potential-free
/// proper subdomains, where the matrix is positive definite and direct
/// factorization fills in badly on 3D boxes.
class DirichletSolver {
 public:
  static constexpr std::size_t kDirectLimit = 8000;

  /// Throws Error(recurrence) when the matrix is singular, e.g. for the whole
  /// space without a positive potential.
  DirichletSolver(const GraphSpace& space, const DomainMask& domain,
                  const PotentialField* potential = nullptr);
  /// Solves A h = rhs (domain-local vectors).
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  Eigen::SparseMatrix<double> matrix_;
  bool direct_ = true;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg_;
};

/// Poisson(rate) probabilities on [first, first + weights.size()), normalised
/// over that window; the mass outside is below 1e-16.
struct PoissonWindow {
  std::size_t first = 0;
  std::vector<double> weights;
  static PoissonWindow make(double rate);
};

/// Action of exp(-t H) for the killed generator H = M^-1 A + V on a domain by
/// uniformization: exp(-tH) = sum_k Poisson(qt; k) P^k with P = I - H/q.
class Uniformization {
 public:
  Uniformization(const GraphSpace& space, const DomainMask& domain,
                 const PotentialField* potential = nullptr);
  /// exp(-t H) v.
  Eigen::VectorXd apply(double t, const Eigen::VectorXd& v) const;
  /// int_0^T exp(-t H) v dt.
  Eigen::VectorXd integrate(double T, const Eigen::VectorXd& v) const;
  double rate() const { return q_; }

 private:
  Eigen::SparseMatrix<double, Eigen::RowMajor> step_;
  double q_ = 1.0;
};

}  // namespace dlab
