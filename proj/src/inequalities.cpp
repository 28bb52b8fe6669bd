#include "dlab/inequalities.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "dlab/error.hpp"
#include "dlab/linalg.hpp"

namespace dlab {

namespace {

Vertex lattice_center(int dim, int extent) {
  std::array<int, 3> c{};
  for (int k = 0; k < dim; ++k) c[static_cast<std::size_t>(k)] = extent / 2;
  return lattice_vertex(extent, std::span<const int>(c.data(), static_cast<std::size_t>(dim)));
}

Vertex lattice_offset(int dim, int extent, int along_first) {
  std::array<int, 3> c{};
  for (int k = 0; k < dim; ++k) c[static_cast<std::size_t>(k)] = extent / 2;
  c[0] += along_first;
  require(c[0] >= 0 && c[0] < extent, ErrorKind::geometry, "offset point lies outside the box");
  return lattice_vertex(extent, std::span<const int>(c.data(), static_cast<std::size_t>(dim)));
}

// Sign of the bottom eigenvalue of -Laplacian + V on a domain through a
// sparse LDL^T: positive definite energy matrix <=> lambda > 0.
bool energy_positive(const GraphSpace& space, const DomainMask& omega, const PotentialField& V) {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(energy_matrix(space, omega, &V));
  if (ldlt.info() != Eigen::Success) return false;
  return ldlt.vectorD().minCoeff() > 0.0;
}

}  // namespace

DomainMask closed_ball(const GraphSpace& space, Vertex o, double r) {
  require(r >= 0.0, ErrorKind::domain, "radius must be nonnegative");
  const double slack = 1e-12 * std::max(1.0, r);
  auto d = space.distances_from(o, r + 2.0 * slack);
  std::vector<Vertex> vs;
  for (Vertex y = 0; y < space.size(); ++y) {
    if (d[y] <= r + slack) vs.push_back(y);
  }
  return DomainMask::from_vertices(space, std::move(vs));
}

DomainMask box_interior(const GraphSpace& space) {
  auto faces = degree_deficient_vertices(space);
  std::vector<char> face(space.size(), 0);
  for (Vertex x : faces) face[x] = 1;
  std::vector<Vertex> vs;
  for (Vertex x = 0; x < space.size(); ++x) {
    if (!face[x]) vs.push_back(x);
  }
  require(!vs.empty(), ErrorKind::geometry, "box has no interior");
  return DomainMask::from_vertices(space, std::move(vs));
}

HittingCertificate hitting_certificate(const GraphSpace& space, const GeneratorSpectrum& whole, Vertex o,
                                       const std::vector<Vertex>& K, double r, double eta) {
  require(whole.domain().is_whole(), ErrorKind::domain, "hitting certificate needs the whole-space spectrum");
  require(!K.empty(), ErrorKind::instance, "target set K is empty");
  require(o < space.size(), ErrorKind::instance, "start vertex out of range");
  auto target = DomainMask::from_vertices(space, K);
  require(!target.contains(o), ErrorKind::instance, "start vertex o lies in K");
  auto d = space.distances_from(o);
  for (Vertex k : target.vertices()) {
    require(d[k] < r, ErrorKind::instance, "K is not contained in B(o, r)");
  }
  HittingCertificate c;
  c.o = o;
  c.K.assign(target.vertices().begin(), target.vertices().end());
  c.r = r;
  c.T = truncation_time(space.scaling(), r, eta);

  std::vector<Vertex> rows = c.K;
  rows.push_back(o);
  Eigen::MatrixXd g = green_truncated_block(whole, c.T, rows, c.K);
  const auto n = static_cast<Eigen::Index>(c.K.size());
  const double mk = target.measure(space);
  double integral = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double nx = space.measure(c.K[static_cast<std::size_t>(i)]) / mk;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double ny = space.measure(c.K[static_cast<std::size_t>(j)]) / mk;
      integral += nx * ny * g(i, j) / g(n, j);
    }
  }
  c.double_integral = integral;
  c.green_ratio_bound = 1.0 / (2.0 * integral);
  c.exact_prob = exact_hitting_prob_by_time(space, target, o, c.T).value;
  c.volume_ratio = mk / volume(space, o, r);
  c.pass = c.green_ratio_bound <= c.exact_prob + kBoundSlack;
  return c;
}

double fit_hitting_constant(const std::vector<HittingCertificate>& certs) {
  require(!certs.empty(), ErrorKind::sampling, "no certificates to calibrate against");
  double c1 = kInf;
  for (const auto& c : certs) c1 = std::min(c1, c.exact_prob / c.volume_ratio);
  return c1;
}

FarHittingReport hitting_far_bound(int dim, const std::vector<int>& extents, double ball_radius, int distance,
                                   double theta) {
  require(!extents.empty(), ErrorKind::domain, "no box extents given");
  require(distance >= 2 && theta >= distance, ErrorKind::domain, "needs d(o, x) >= 2 and theta >= d(o, x)");
  FarHittingReport rep;
  for (int n : extents) {
    auto box = build_lattice(dim, n, false);
    const Vertex o = lattice_center(dim, n);
    const Vertex x = lattice_offset(dim, n, distance);
    auto region = box_interior(box);
    require(region.contains(x), ErrorKind::geometry, "start point touches the box faces");
    auto h = hit_before_exit(box, region, closed_ball(box, o, ball_radius));
    rep.sweep.push_back({n, h[x]});
    if (n == extents.back()) rep.rate = box.scaling().F(theta) / volume(box, o, theta);
  }
  rep.probability = rep.sweep.back().probability;
  if (rep.sweep.size() > 1) {
    const double prev = rep.sweep[rep.sweep.size() - 2].probability;
    rep.relative_change = std::abs(rep.probability - prev) / rep.probability;
  }
  rep.constant = rep.probability / rep.rate;
  return rep;
}

std::vector<AnnulusHitting> annulus_hitting(const GraphSpace& box, Vertex o, const std::vector<double>& radii) {
  auto region = box_interior(box);
  auto d = box.distances_from(o);
  std::vector<AnnulusHitting> out;
  for (double r : radii) {
    auto h = hit_before_exit(box, region, closed_ball(box, o, r));
    double m = kInf;
    for (Vertex x : region.vertices()) {
      if (d[x] > r && d[x] < 2.0 * r) m = std::min(m, h[x]);
    }
    require(std::isfinite(m), ErrorKind::geometry, "annulus is empty");
    out.push_back({r, m});
  }
  return out;
}

LiebReport verify_lieb(const GraphSpace& space, const DomainMask& omega, const PotentialField& V,
                       const std::vector<double>& u, const std::vector<double>& kappas, LiebRadius variant,
                       double eta, double p) {
  require(u.size() == space.size(), ErrorKind::domain, "solution has wrong length");
  const auto& sc = space.scaling();
  LiebReport rep;
  double best = -1.0;
  for (Vertex x : omega.vertices()) {
    if (std::abs(u[x]) > best) {
      best = std::abs(u[x]);
      rep.o = x;
    }
  }
  require(best > 0.0, ErrorKind::instance, "solution vanishes identically");
  rep.theta = V.theta(omega);
  rep.norm_p = V.negative_norm(space, omega, p);
  rep.residual = relative_residual(space, omega, &V, u, 0.0);
  rep.degenerate = rep.theta == 0.0;
  const double rho = 1.0 - sc.alpha2 / (sc.beta * p);
  if (variant == LiebRadius::lp_norm) require(rho > 0.0, ErrorKind::domain, "needs p > alpha / beta");
  auto d = space.distances_from(rep.o);
  for (double kappa : kappas) {
    require(kappa > 0.0, ErrorKind::domain, "kappa must be positive");
    LiebCoverage c;
    c.kappa = kappa;
    if (rep.degenerate) {
      c.r = kInf;
    } else if (variant == LiebRadius::sup_norm) {
      c.r = 0.5 * eta * sc.R(kappa / rep.theta);
    } else {
      c.r = kappa * std::pow(rep.norm_p, -1.0 / (sc.beta * rho));
    }
    double in = 0.0, all = 0.0;
    for (Vertex y = 0; y < space.size(); ++y) {
      if (d[y] < c.r) {
        all += space.measure(y);
        if (omega.contains(y)) in += space.measure(y);
      }
    }
    c.coverage = in / all;
    rep.sweep.push_back(c);
  }
  return rep;
}

double lieb_kappa_star(const std::vector<LiebReport>& reports, double epsilon) {
  require(!reports.empty(), ErrorKind::sampling, "no Lieb reports");
  double star = 0.0;
  const std::size_t n = reports.front().sweep.size();
  for (std::size_t i = 0; i < n; ++i) {
    bool ok = true;
    for (const auto& r : reports) ok = ok && r.sweep[i].coverage >= 1.0 - epsilon - 1e-12;
    if (!ok) break;
    star = reports.front().sweep[i].kappa;
  }
  return star;
}

KellerValues keller_bounds(const GraphSpace& space, const DomainMask& omega, const PotentialField& V, double p) {
  const auto& sc = space.scaling();
  const double alpha = sc.alpha2;
  require(p > std::max(alpha / sc.beta, 1.0), ErrorKind::domain, "Keller bounds need p > max(alpha / beta, 1)");
  KellerValues k;
  k.lambda = principal_eigenvalue(space, omega, &V).lambda0;
  k.norm_p = V.negative_norm(space, omega, p);
  k.measure = omega.measure(space);
  k.product = std::pow(k.measure, sc.beta / alpha - 1.0 / p) * k.norm_p;
  k.eta = 1.0 - alpha / (sc.beta * p);
  if (k.lambda <= 0.0 && k.norm_p > 0.0) k.moment_ratio = std::pow(std::abs(k.lambda), k.eta) / k.norm_p;
  return k;
}

double critical_well_depth(const GraphSpace& space, const DomainMask& omega, const std::vector<Vertex>& well) {
  require(!well.empty(), ErrorKind::domain, "well is empty");
  auto potential = [&](double depth) {
    std::vector<double> v(space.size(), 0.0);
    for (Vertex x : well) v[x] = -depth;
    return PotentialField(std::move(v));
  };
  double lo = 0.0, hi = 1.0;
  while (energy_positive(space, omega, potential(hi))) {
    lo = hi;
    hi *= 2.0;
    require(hi < 1e12, ErrorKind::numeric, "no critical depth found");
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    (energy_positive(space, omega, potential(mid)) ? lo : hi) = mid;
  }
  return hi;
}

SupersolutionVerdict check_supersolution(const GraphSpace& space, const SupersolutionInstance& inst) {
  require(inst.omega != nullptr, ErrorKind::domain, "supersolution instance needs a domain");
  require(inst.u.size() == space.size(), ErrorKind::domain, "u has wrong length");
  require(inst.V.empty() || inst.V.size() == space.size(), ErrorKind::domain, "V has wrong length");
  require(inst.p >= 1.0, ErrorKind::domain, "exponent p must be >= 1");
  for (double v : inst.u) require(v >= 0.0, ErrorKind::domain, "u must be nonnegative");
  auto f = inst.f ? inst.f : [p = inst.p](double t) { return std::pow(t, p); };
  require(f(0.0) == 0.0, ErrorKind::domain, "profile f must vanish at 0");
  auto lu = negative_laplacian(space, inst.u);
  SupersolutionVerdict out;
  std::vector<double> rhs(space.size(), 0.0);
  for (Vertex x : inst.omega->vertices()) {
    if (!inst.V.empty()) rhs[x] = inst.V[x] * f(inst.u[x]);
    out.scale = std::max({out.scale, std::abs(lu[x]), std::abs(rhs[x])});
  }
  const double tol = 1e-10 * (out.scale > 0.0 ? out.scale : 1.0);
  for (Vertex x : inst.omega->vertices()) {
    if (lu[x] < rhs[x] - tol) out.violations.push_back(x);
  }
  out.pass = out.violations.empty();
  return out;
}

std::vector<ProfileRow> liouville_profile(const GraphSpace& space, const DomainMask& region,
                                          const std::vector<double>& u, Vertex o, const std::vector<double>& radii,
                                          double p) {
  SupersolutionInstance inst;
  inst.u = u;
  inst.omega = &region;
  auto verdict = check_supersolution(space, inst);
  require(verdict.pass, ErrorKind::instance,
          "u is not superharmonic on the region (" + std::to_string(verdict.violations.size()) + " violations)");
  auto d = space.distances_from(o);
  auto inf_over = [&](double r) {
    double m = kInf;
    for (Vertex y = 0; y < space.size(); ++y) {
      if (d[y] < r) m = std::min(m, u[y]);
    }
    return m;
  };
  const auto& sc = space.scaling();
  std::vector<ProfileRow> rows;
  for (double r : radii) {
    require(r > 0.0, ErrorKind::geometry, "radius must be positive");
    ProfileRow row;
    row.r = r;
    row.M = inf_over(r);
    row.M2 = inf_over(2.0 * r);
    row.kappa2 = row.M / std::min(1.0, sc.F(r) / volume(space, o, r));
    row.kappa3 = row.M2 > 0.0 ? row.M / row.M2 : kInf;
    row.chain = std::pow(row.M, p - 1.0) * sc.F(r);
    rows.push_back(row);
  }
  return rows;
}

std::vector<PotentialProfileRow> liouville_potential_profile(const GraphSpace& space, const PotentialField& V,
                                                             Vertex o, double kappa, const std::vector<double>& radii,
                                                             std::size_t stride) {
  for (double v : V.values()) require(v >= 0.0, ErrorKind::domain, "potential must be nonnegative");
  require(stride >= 1, ErrorKind::domain, "stride must be >= 1");
  const auto& sc = space.scaling();
  auto d = space.distances_from(o);
  std::vector<PotentialProfileRow> out;
  for (double r : radii) {
    require(r > 1.0, ErrorKind::geometry, "radius must exceed 1");
    std::vector<Vertex> annulus;
    for (Vertex x = 0; x < space.size(); ++x) {
      if (d[x] >= 0.5 * r && d[x] <= r) annulus.push_back(x);
    }
    require(!annulus.empty(), ErrorKind::geometry, "annulus is empty");
    PotentialProfileRow row;
    row.r = r;
    const double scale = sc.F(r) / volume(space, o, r);
    row.phi_kappa = kInf;
    for (Vertex x : annulus) {
      double s = 0.0;
      for (Vertex y : ball_vertices(space, x, kappa * r)) s += V[y] * space.measure(y);
      row.phi_kappa = std::min(row.phi_kappa, scale * s);
    }
    row.psi_inf = kInf;
    for (std::size_t k = 0; k < annulus.size(); k += stride) {
      const Vertex x = annulus[k];
      auto ball = DomainMask::ball(space, x, r - 1.0);
      DirichletSolver solver(space, ball);
      auto verts = ball.vertices();
      Eigen::VectorXd rhs(static_cast<Eigen::Index>(verts.size()));
      for (std::size_t i = 0; i < verts.size(); ++i) {
        rhs[static_cast<Eigen::Index>(i)] = V[verts[i]] * space.measure(verts[i]);
      }
      Eigen::VectorXd w = solver.solve(rhs);
      row.psi_inf = std::min(row.psi_inf, w[ball.local_index(x)]);
      ++row.annulus_points;
    }
    row.ratio = row.phi_kappa > 0.0 ? row.psi_inf / row.phi_kappa : 0.0;
    out.push_back(row);
  }
  return out;
}

RecurrentReport recurrent_liouville_check(int dim, const std::vector<int>& extents, double ball_radius,
                                          int distance, OuterBoundary boundary) {
  require(!extents.empty(), ErrorKind::domain, "no box extents given");
  RecurrentReport rep;
  for (int n : extents) {
    auto box = build_lattice(dim, n, false);
    const Vertex o = lattice_center(dim, n);
    auto target = closed_ball(box, o, ball_radius);
    const Vertex x = lattice_offset(dim, n, std::min(distance, n - 1 - n / 2));
    double prob = 1.0;
    if (!target.contains(x)) {
      auto region = boundary == OuterBoundary::absorbing ? box_interior(box) : DomainMask::whole(box);
      prob = hit_before_exit(box, region, target)[x];
    }
    rep.rows.push_back({n, prob});
  }
  rep.increasing = true;
  for (std::size_t k = 1; k < rep.rows.size(); ++k) {
    rep.increasing = rep.increasing && rep.rows[k].probability > rep.rows[k - 1].probability;
  }
  rep.final_probability = rep.rows.back().probability;
  return rep;
}

LocalFkReport local_fk_certificate(const GraphSpace& space, const DomainMask& omega, const PotentialField& V,
                                   const std::vector<double>& u) {
  const auto& sc = space.scaling();
  const double denom = sc.alpha1 - sc.alpha2 + sc.beta;
  require(denom > 0.0, ErrorKind::domain, "space ineligible: alpha1 - alpha2 + beta <= 0");
  require(u.size() == space.size(), ErrorKind::domain, "solution has wrong length");
  require(V.theta(omega) > 0.0, ErrorKind::instance,
          "V- vanishes on Omega, so no nontrivial zero-energy solution exists");
  LocalFkReport rep;
  rep.p = sc.alpha1 / denom;
  double best = -1.0, sup = 0.0;
  for (Vertex x : omega.vertices()) {
    sup = std::max(sup, std::abs(u[x]));
    if (std::abs(u[x]) > best) {
      best = std::abs(u[x]);
      rep.o = x;
    }
  }
  require(sup > 0.0, ErrorKind::instance, "solution vanishes identically");
  rep.u_ratio = best / sup;
  rep.median = median_exit_time(space, omega, rep.o);
  rep.radius = sc.R(rep.median.time);
  const auto& neg = V.negative_part();
  for (Vertex z : omega.vertices()) {
    std::vector<Vertex> support;
    for (Vertex y : ball_vertices(space, z, rep.radius)) {
      if (omega.contains(y)) support.push_back(y);
    }
    const double n = lorentz_norm(neg, space.measures(), support, rep.p, LorentzSecond::one);
    if (n > rep.max_norm) {
      rep.max_norm = n;
      rep.best_center = z;
    }
  }
  return rep;
}

}  // namespace dlab
