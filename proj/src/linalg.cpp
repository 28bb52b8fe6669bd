#include "dlab/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "dlab/error.hpp"

namespace dlab {

std::vector<double> negative_laplacian(const GraphSpace& space, std::span<const double> f) {
  require(f.size() == space.size(), ErrorKind::domain, "vertex function has wrong length");
  std::vector<double> out(space.size(), 0.0);
  for (Vertex x = 0; x < space.size(); ++x) {
    double s = 0.0;
    for (const auto& nb : space.neighbors(x)) s += nb.conductance * (f[x] - f[nb.to]);
    out[x] = s / space.measure(x);
  }
  return out;
}

Eigen::SparseMatrix<double> energy_matrix(const GraphSpace& space, const DomainMask& domain,
                                          const PotentialField* potential) {
  require(!potential || potential->size() == space.size(), ErrorKind::domain,
          "potential has wrong length");
  std::vector<Eigen::Triplet<double>> entries;
  for (Vertex x : domain.vertices()) {
    const auto i = static_cast<int>(domain.local_index(x));
    double diag = space.degree(x);
    if (potential) diag += space.measure(x) * (*potential)[x];
    entries.emplace_back(i, i, diag);
    for (const auto& nb : space.neighbors(x)) {
      auto j = domain.local_index(nb.to);
      if (j >= 0) entries.emplace_back(i, static_cast<int>(j), -nb.conductance);
    }
  }
  const auto n = static_cast<Eigen::Index>(domain.size());
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

Eigen::MatrixXd symmetrized_generator(const GraphSpace& space, const DomainMask& domain,
                                      const PotentialField* potential) {
  const auto n = static_cast<Eigen::Index>(domain.size());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  auto verts = domain.vertices();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vertex x = verts[static_cast<std::size_t>(i)];
    s(i, i) = space.jump_rate(x) + (potential ? (*potential)[x] : 0.0);
    for (const auto& nb : space.neighbors(x)) {
      auto j = domain.local_index(nb.to);
      if (j >= 0) s(i, j) = -nb.conductance / std::sqrt(space.measure(x) * space.measure(nb.to));
    }
  }
  return s;
}

DirichletSolver::DirichletSolver(const GraphSpace& space, const DomainMask& domain,
                                 const PotentialField* potential) {
  if (!potential && !domain.is_whole() && domain.size() > kDirectLimit) {
    direct_ = false;
    matrix_ = energy_matrix(space, domain);
    cg_.setTolerance(1e-14);
    cg_.setMaxIterations(static_cast<Eigen::Index>(10 * domain.size()));
    cg_.compute(matrix_);
    require(cg_.info() == Eigen::Success, ErrorKind::numeric, "preconditioner setup failed");
    return;
  }
  auto a = energy_matrix(space, domain, potential);
  ldlt_.compute(a);
  require(ldlt_.info() == Eigen::Success, ErrorKind::numeric, "sparse factorization failed");
  const auto& d = ldlt_.vectorD();
  const double scale = std::max(d.cwiseAbs().maxCoeff(), 1e-300);
  require(d.minCoeff() > 1e-12 * scale, ErrorKind::recurrence,
          "energy matrix is singular on this domain (no killing)");
}

Eigen::VectorXd DirichletSolver::solve(const Eigen::VectorXd& rhs) const {
  if (!direct_) {
    Eigen::VectorXd h = cg_.solve(rhs);
    require(cg_.info() == Eigen::Success, ErrorKind::numeric, "conjugate gradients did not converge");
    return h;
  }
  Eigen::VectorXd h = ldlt_.solve(rhs);
  require(ldlt_.info() == Eigen::Success, ErrorKind::numeric, "sparse solve failed");
  return h;
}

PoissonWindow PoissonWindow::make(double rate) {
  require(rate >= 0.0 && std::isfinite(rate), ErrorKind::domain, "Poisson rate must be finite and >= 0");
  PoissonWindow w;
  if (rate == 0.0) {
    w.weights = {1.0};
    return w;
  }
  constexpr double kCut = 1e-20;
  const auto mode = static_cast<std::size_t>(std::floor(rate));
  std::vector<double> left;  // mode-1, mode-2, ...
  double u = 1.0;
  for (std::size_t k = mode; k > 0; --k) {
    u *= static_cast<double>(k) / rate;
    if (u < kCut) break;
    left.push_back(u);
  }
  std::vector<double> right{1.0};  // mode, mode+1, ...
  u = 1.0;
  for (std::size_t k = mode;; ++k) {
    u *= rate / static_cast<double>(k + 1);
    if (u < kCut && static_cast<double>(k) > rate) break;
    right.push_back(u);
  }
  w.first = mode - left.size();
  w.weights.assign(left.rbegin(), left.rend());
  w.weights.insert(w.weights.end(), right.begin(), right.end());
  double total = 0.0;
  for (double x : w.weights) total += x;
  for (double& x : w.weights) x /= total;
  return w;
}

Uniformization::Uniformization(const GraphSpace& space, const DomainMask& domain,
                               const PotentialField* potential) {
  auto a = energy_matrix(space, domain, potential);
  auto verts = domain.vertices();
  double qmax = 0.0;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    qmax = std::max(qmax, a.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) /
                              space.measure(verts[i]));
  }
  q_ = qmax > 0.0 ? qmax : 1.0;
  // P = I - M^-1 A / q
  std::vector<Eigen::Triplet<double>> entries;
  for (int k = 0; k < a.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
      const auto row = it.row();
      double v = -it.value() / (space.measure(verts[static_cast<std::size_t>(row)]) * q_);
      if (row == it.col()) v += 1.0;
      entries.emplace_back(static_cast<int>(row), static_cast<int>(it.col()), v);
    }
  }
  step_.resize(a.rows(), a.cols());
  step_.setFromTriplets(entries.begin(), entries.end());
}

Eigen::VectorXd Uniformization::apply(double t, const Eigen::VectorXd& v) const {
  require(t >= 0.0, ErrorKind::domain, "time must be nonnegative");
  auto window = PoissonWindow::make(q_ * t);
  Eigen::VectorXd cur = v;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  const std::size_t last = window.first + window.weights.size();
  for (std::size_t k = 0; k < last; ++k) {
    if (k >= window.first) out += window.weights[k - window.first] * cur;
    if (k + 1 < last) cur = step_ * cur;
  }
  return out;
}

Eigen::VectorXd Uniformization::integrate(double T, const Eigen::VectorXd& v) const {
  require(T >= 0.0, ErrorKind::domain, "time must be nonnegative");
  if (T == 0.0) return Eigen::VectorXd::Zero(v.size());
  auto window = PoissonWindow::make(q_ * T);
  // tail[k] = P(N > k) for k in the window; 1 below it.
  std::vector<double> tail(window.weights.size(), 0.0);
  double acc = 0.0;
  for (std::size_t k = window.weights.size(); k-- > 0;) {
    tail[k] = acc;
    acc += window.weights[k];
  }
  Eigen::VectorXd cur = v;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  const std::size_t last = window.first + window.weights.size();
  for (std::size_t k = 0; k < last; ++k) {
    const double w = k < window.first ? 1.0 : tail[k - window.first];
    out += w * cur;
    if (k + 1 < last) cur = step_ * cur;
  }
  return out / q_;
}

}  // namespace dlab
