#include "dlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "dlab/error.hpp"
#include "dlab/linalg.hpp"

namespace dlab {

namespace {

// Shortest-path distance to the nearest source vertex.
std::vector<double> distance_to_set(const GraphSpace& space, const std::vector<char>& source) {
  std::vector<double> dist(space.size(), kInf);
  using Item = std::pair<double, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (Vertex x = 0; x < space.size(); ++x) {
    if (source[x]) {
      dist[x] = 0.0;
      heap.emplace(0.0, x);
    }
  }
  while (!heap.empty()) {
    auto [d, x] = heap.top();
    heap.pop();
    if (d > dist[x]) continue;
    for (const auto& nb : space.neighbors(x)) {
      const double nd = d + nb.length;
      if (nd < dist[nb.to]) {
        dist[nb.to] = nd;
        heap.emplace(nd, nb.to);
      }
    }
  }
  return dist;
}

double zero_tolerance(std::span<const double> u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return 1e-10 * m;
}

}  // namespace

double inner_product(const GraphSpace& space, std::span<const double> f, std::span<const double> g) {
  require(f.size() == space.size() && g.size() == space.size(), ErrorKind::domain,
          "vertex function has wrong length");
  double s = 0.0;
  for (Vertex x = 0; x < space.size(); ++x) s += f[x] * g[x] * space.measure(x);
  return s;
}

std::vector<double> feynman_kac_apply(const GraphSpace& space, const GeneratorSpectrum& spec, double t,
                                      std::span<const double> u) {
  require(t >= 0.0, ErrorKind::domain, "time must be nonnegative");
  require(u.size() == space.size(), ErrorKind::domain, "vertex function has wrong length");
  const auto verts = spec.domain().vertices();
  const auto n = static_cast<Eigen::Index>(verts.size());
  Eigen::VectorXd weighted(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vertex x = verts[static_cast<std::size_t>(i)];
    weighted[i] = u[x] * space.measure(x);
  }
  Eigen::VectorXd coeff = spec.modes().transpose() * weighted;
  for (Eigen::Index k = 0; k < coeff.size(); ++k) coeff[k] *= std::exp(-spec.eigenvalues()[k] * t);
  Eigen::VectorXd local = spec.modes() * coeff;
  std::vector<double> out(space.size(), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) out[verts[static_cast<std::size_t>(i)]] = local[i];
  return out;
}

PrincipalEigen principal_eigenvalue(const GraphSpace& space, const DomainMask& domain,
                                    const PotentialField* potential) {
  PrincipalEigen out;
  out.lambda0 = kInf;
  std::size_t best = 0;
  for (auto& comp : induced_components(space, domain)) {
    auto mask = DomainMask::from_vertices(space, comp);
    auto spec = assemble_generator(space, mask, potential);
    ComponentGround g;
    g.vertices = std::move(comp);
    g.lambda = spec.eigenvalue(0);
    g.phi = spec.mode_function(0);
    if (g.lambda < out.lambda0) {
      out.lambda0 = g.lambda;
      best = out.components.size();
    }
    out.components.push_back(std::move(g));
  }
  out.phi1 = out.components[best].phi;
  const double tol = 1e-9 * std::max(1.0, std::abs(out.lambda0));
  std::size_t ties = 0;
  for (const auto& g : out.components) {
    if (g.lambda - out.lambda0 <= tol) ++ties;
  }
  out.degenerate = ties > 1;
  return out;
}

double relative_residual(const GraphSpace& space, const DomainMask& domain, const PotentialField* potential,
                         std::span<const double> u, double lambda) {
  auto lu = negative_laplacian(space, u);
  double norm = 0.0;
  for (double v : u) norm = std::max(norm, std::abs(v));
  require(norm > 0.0, ErrorKind::domain, "residual of the zero function");
  double r = 0.0;
  for (Vertex x : domain.vertices()) {
    const double v = potential ? (*potential)[x] : 0.0;
    r = std::max(r, std::abs(lu[x] + (v - lambda) * u[x]));
  }
  return r / norm;
}

EigenSolution eigen_solution(const GraphSpace& space, const GeneratorSpectrum& spec,
                             const PotentialField* potential, std::size_t index) {
  require(index < spec.size(), ErrorKind::domain, "eigenpair index out of range");
  EigenSolution s;
  s.u = spec.mode_function(index);
  s.lambda = spec.eigenvalue(index);
  s.residual = relative_residual(space, spec.domain(), potential, s.u, s.lambda);
  return s;
}

BallEigenReport eigenvalue_ball_bound(const GraphSpace& space, const std::vector<BallSpec>& balls) {
  BallEigenReport rep;
  for (const auto& b : balls) {
    auto mask = DomainMask::ball(space, b.center, b.r);
    require(mask.size() < space.size(), ErrorKind::geometry, "ball covers the whole space");
    auto pe = principal_eigenvalue(space, mask);
    BallEigenvalue e{b, pe.lambda0, pe.lambda0 * space.scaling().F(b.r)};
    rep.max_product = std::max(rep.max_product, e.product);
    rep.min_product = std::min(rep.min_product, e.product);
    rep.balls.push_back(e);
  }
  return rep;
}

double default_fk_exponent(const ScalingLaw& scaling) { return scaling.beta / scaling.alpha2; }

double faber_krahn_functional(const GraphSpace& space, BallSpec ball, const DomainMask& omega, double nu) {
  auto b = DomainMask::ball(space, ball.center, ball.r);
  require(omega.subset_of(b), ErrorKind::domain, "Omega must lie inside the ball");
  auto pe = principal_eigenvalue(space, omega);
  return pe.lambda0 * space.scaling().F(ball.r) * std::pow(omega.measure(space) / b.measure(space), nu);
}

double same_sign_radius(const GraphSpace& space, std::span<const double> u) {
  require(u.size() == space.size(), ErrorKind::domain, "vertex function has wrong length");
  const double tol = zero_tolerance(u);
  std::vector<char> nonpos(space.size()), nonneg(space.size());
  for (Vertex x = 0; x < space.size(); ++x) {
    nonpos[x] = u[x] <= tol;
    nonneg[x] = u[x] >= -tol;
  }
  auto to_nonpos = distance_to_set(space, nonpos);
  auto to_nonneg = distance_to_set(space, nonneg);
  double rho = 0.0;
  for (Vertex x = 0; x < space.size(); ++x) {
    if (u[x] > tol) rho = std::max(rho, to_nonpos[x]);
    if (u[x] < -tol) rho = std::max(rho, to_nonneg[x]);
  }
  return rho;
}

std::vector<Vertex> wavelength_violations(const GraphSpace& space, const DomainMask& domain,
                                          std::span<const double> u, double rho) {
  require(u.size() == space.size(), ErrorKind::domain, "vertex function has wrong length");
  const double tol = zero_tolerance(u);
  std::vector<Vertex> bad;
  for (Vertex z : domain.vertices()) {
    auto ball = ball_vertices(space, z, rho);
    bool inside = true, pos = true, neg = true;
    for (Vertex y : ball) {
      inside = inside && domain.contains(y);
      pos = pos && u[y] > tol;
      neg = neg && u[y] < -tol;
    }
    if (inside && !ball.empty() && (pos || neg)) bad.push_back(z);
  }
  return bad;
}

}  // namespace dlab
