#include "dlab/heatkernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dlab/error.hpp"
#include "dlab/linalg.hpp"

namespace dlab {

namespace {

// int_0^T exp(-lambda t) dt, stable near lambda = 0.
double truncated_weight(double lambda, double T) {
  const double x = lambda * T;
  if (std::abs(x) < 1e-8) return T * (1.0 - 0.5 * x);
  return -std::expm1(-x) / lambda;
}

Eigen::Index local_row(const GeneratorSpectrum& spec, Vertex x) {
  require(x < spec.domain().space_size(), ErrorKind::domain, "vertex out of range");
  auto i = spec.domain().local_index(x);
  require(i >= 0, ErrorKind::domain, "vertex lies outside the spectral domain");
  return static_cast<Eigen::Index>(i);
}

}  // namespace

GeneratorSpectrum::GeneratorSpectrum(DomainMask domain, Eigen::VectorXd eigenvalues, Eigen::MatrixXd modes)
    : domain_(std::move(domain)), eigenvalues_(std::move(eigenvalues)), modes_(std::move(modes)) {}

double GeneratorSpectrum::mode(std::size_t n, Vertex x) const {
  auto i = domain_.local_index(x);
  return i < 0 ? 0.0 : modes_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n));
}

std::vector<double> GeneratorSpectrum::mode_function(std::size_t n) const {
  std::vector<double> f(domain_.space_size(), 0.0);
  auto verts = domain_.vertices();
  for (std::size_t i = 0; i < verts.size(); ++i) {
    f[verts[i]] = modes_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n));
  }
  return f;
}

bool GeneratorSpectrum::ground_degenerate() const {
  if (size() < 2) return false;
  const double scale = std::max({1.0, std::abs(eigenvalues_[0]), std::abs(eigenvalues_[eigenvalues_.size() - 1])});
  return eigenvalues_[1] - eigenvalues_[0] <= 1e-9 * scale;
}

GeneratorSpectrum assemble_generator(const GraphSpace& space, const DomainMask& domain,
                                     const PotentialField* potential) {
  require(domain.space_size() == space.size(), ErrorKind::domain, "domain belongs to another space");
  require(domain.size() <= kMaxDenseDomain, ErrorKind::size,
          "domain has " + std::to_string(domain.size()) + " vertices; dense limit is " +
              std::to_string(kMaxDenseDomain));
  if (potential) {
    for (Vertex x : domain.vertices()) {
      require(std::isfinite((*potential)[x]), ErrorKind::domain, "potential must be bounded");
    }
  }
  Eigen::MatrixXd s = symmetrized_generator(space, domain, potential);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  require(solver.info() == Eigen::Success, ErrorKind::numeric, "eigensolver did not converge");
  Eigen::MatrixXd modes = solver.eigenvectors();
  auto verts = domain.vertices();
  for (Eigen::Index i = 0; i < modes.rows(); ++i) {
    modes.row(i) /= std::sqrt(space.measure(verts[static_cast<std::size_t>(i)]));
  }
  for (Eigen::Index n = 0; n < modes.cols(); ++n) {
    Eigen::Index arg = 0;
    modes.col(n).cwiseAbs().maxCoeff(&arg);
    if (modes(arg, n) < 0.0) modes.col(n) *= -1.0;
  }
  return GeneratorSpectrum(domain, solver.eigenvalues(), std::move(modes));
}

double heat_kernel(const GeneratorSpectrum& spec, double t, Vertex x, Vertex y) {
  require(t >= 0.0, ErrorKind::domain, "time must be nonnegative");
  const auto i = local_row(spec, x), j = local_row(spec, y);
  const auto& m = spec.modes();
  const auto& lam = spec.eigenvalues();
  double s = 0.0;
  for (Eigen::Index n = 0; n < lam.size(); ++n) s += std::exp(-lam[n] * t) * m(i, n) * m(j, n);
  return s;
}

Eigen::MatrixXd heat_kernel_matrix(const GeneratorSpectrum& spec, double t) {
  require(t >= 0.0, ErrorKind::domain, "time must be nonnegative");
  Eigen::VectorXd w = (-spec.eigenvalues().array() * t).exp();
  return spec.modes() * w.asDiagonal() * spec.modes().transpose();
}

double green(const GeneratorSpectrum& spec, Vertex x, Vertex y) {
  const auto& lam = spec.eigenvalues();
  const double scale = std::max(1.0, std::abs(lam[lam.size() - 1]));
  require(lam[0] > 1e-9 * scale, ErrorKind::recurrence,
          "Green function is infinite: bottom eigenvalue vanishes (use green_truncated)");
  const auto i = local_row(spec, x), j = local_row(spec, y);
  const auto& m = spec.modes();
  double s = 0.0;
  for (Eigen::Index n = 0; n < lam.size(); ++n) s += m(i, n) * m(j, n) / lam[n];
  return s;
}

double green_truncated(const GeneratorSpectrum& spec, double T, Vertex x, Vertex y) {
  require(T >= 0.0, ErrorKind::domain, "truncation time must be nonnegative");
  const auto i = local_row(spec, x), j = local_row(spec, y);
  const auto& m = spec.modes();
  const auto& lam = spec.eigenvalues();
  double s = 0.0;
  for (Eigen::Index n = 0; n < lam.size(); ++n) s += truncated_weight(lam[n], T) * m(i, n) * m(j, n);
  return s;
}

Eigen::MatrixXd green_truncated_block(const GeneratorSpectrum& spec, double T,
                                      const std::vector<Vertex>& xs, const std::vector<Vertex>& ys) {
  require(T >= 0.0, ErrorKind::domain, "truncation time must be nonnegative");
  const auto& lam = spec.eigenvalues();
  Eigen::VectorXd w(lam.size());
  for (Eigen::Index n = 0; n < lam.size(); ++n) w[n] = truncated_weight(lam[n], T);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(xs.size()), lam.size());
  Eigen::MatrixXd b(static_cast<Eigen::Index>(ys.size()), lam.size());
  for (std::size_t k = 0; k < xs.size(); ++k) a.row(static_cast<Eigen::Index>(k)) = spec.modes().row(local_row(spec, xs[k]));
  for (std::size_t k = 0; k < ys.size(); ++k) b.row(static_cast<Eigen::Index>(k)) = spec.modes().row(local_row(spec, ys[k]));
  return a * w.asDiagonal() * b.transpose();
}

double truncation_time(const ScalingLaw& scaling, double r, double eta) {
  require(eta > 0.0 && eta < 1.0, ErrorKind::domain, "eta must lie in (0, 1)");
  return scaling.F(2.0 / eta * r);
}

double phi(const ScalingLaw& scaling, double s) {
  require(s >= 0.0, ErrorKind::domain, "Phi needs s >= 0");
  const double b = scaling.beta;
  return (1.0 - 1.0 / b) * std::pow(b, -1.0 / (b - 1.0)) * std::pow(s, b / (b - 1.0));
}

double phi_grid_sup(const ScalingLaw& scaling, double s) {
  require(s >= 0.0, ErrorKind::domain, "Phi needs s >= 0");
  if (s == 0.0) return 0.0;  // supremum approached as r -> infinity
  const double b = scaling.beta;
  auto value = [&](double u) { return s * std::exp(-u) - std::exp(-b * u); };
  constexpr int kGrid = 10000;
  const double lo = std::log(1e-8), hi = std::log(1e8);
  double best_u = lo, best = value(lo);
  for (int k = 1; k < kGrid; ++k) {
    const double u = lo + (hi - lo) * k / (kGrid - 1);
    const double v = value(u);
    if (v > best) {
      best = v;
      best_u = u;
    }
  }
  // Newton on the derivative in u = log r.
  double u = best_u;
  for (int it = 0; it < 50; ++it) {
    const double d1 = -s * std::exp(-u) + b * std::exp(-b * u);
    const double d2 = s * std::exp(-u) - b * b * std::exp(-b * u);
    if (d2 >= 0.0) break;
    const double step = d1 / d2;
    u -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(u))) break;
  }
  return std::max(best, value(u));
}

double envelope_upper(const GraphSpace& space, const HeatKernelEnvelope& env, double t, Vertex x, Vertex y) {
  const auto& sc = space.scaling();
  const double v = volume(space, x, sc.R(t));
  const double d = space.distance(x, y);
  return env.C_ue / v * std::exp(-0.5 * t * phi(sc, env.c_ue * d / t));
}

HeatKernelEnvelope fit_envelope(const GraphSpace& space, const GeneratorSpectrum& spec,
                                const std::vector<KernelSample>& samples, const EnvelopeFitOptions& options) {
  require(samples.size() >= 10, ErrorKind::sampling, "envelope fit needs at least 10 samples");
  require(spec.domain().is_whole(), ErrorKind::domain, "envelope fit needs the whole-space spectrum");
  const auto& sc = space.scaling();
  const double gamma = sc.beta / (sc.beta - 1.0);

  std::map<Vertex, std::vector<double>> dist_cache;
  auto dist = [&](Vertex x) -> const std::vector<double>& {
    auto it = dist_cache.find(x);
    if (it == dist_cache.end()) it = dist_cache.emplace(x, space.distances_from(x)).first;
    return it->second;
  };

  struct Row {
    double logpv;  // log(p V)
    double decay;  // (t/2) Phi(d/t) at c = 1
    double pv;
    double rel;    // d / R(t)
    bool positive;
  };
  HeatKernelEnvelope env;
  std::vector<Row> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) {
    require(s.t > 0.0, ErrorKind::domain, "envelope samples need t > 0");
    const auto& d = dist(s.x);
    const double r = sc.R(s.t);
    double v = 0.0;
    for (Vertex y = 0; y < space.size(); ++y) {
      if (d[y] < r) v += space.measure(y);
    }
    if (v == 0.0) v = space.measure(s.x);  // R(t) = 0 cannot happen for t > 0; guard anyway
    const double p = heat_kernel(spec, s.t, s.x, s.y);
    Row row{};
    row.positive = p > 0.0 && std::isfinite(p);
    row.pv = p * v;
    row.logpv = row.positive ? std::log(p * v) : -kInf;
    row.decay = 0.5 * s.t * phi(sc, d[s.y] / s.t);
    row.rel = d[s.y] / r;
    rows.push_back(row);
  }

  // Upper estimate: log C >= logpv + a * decay, a = c^gamma.
  double base = -kInf;
  for (const auto& r : rows) {
    if (r.positive) base = std::max(base, r.logpv);
  }
  if (!std::isfinite(base)) {
    for (const auto& s : samples) env.failures.push_back(s);
    return env;
  }
  const double budget = std::log(options.decay_budget);
  auto worst = [&](double a) {
    double w = -kInf;
    for (const auto& r : rows) {
      if (r.positive) w = std::max(w, r.logpv + a * r.decay);
    }
    return w;
  };
  const double a_cap = std::pow(1e3, gamma);
  double a_lo = 0.0, a_hi = a_cap;
  if (worst(a_hi) <= base + budget) {
    a_lo = a_hi;
  } else {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a_lo + a_hi);
      (worst(mid) <= base + budget ? a_lo : a_hi) = mid;
    }
  }
  env.c_ue = std::pow(a_lo, 1.0 / gamma);
  env.C_ue = std::exp(worst(a_lo));

  // Near-diagonal lower estimate.
  std::vector<double> eta_grid;
  for (int k = 1; k <= 19; ++k) eta_grid.push_back(0.05 * k);
  auto lower = [&](double eta) {
    double m = kInf;
    for (const auto& r : rows) {
      if (r.rel <= eta) m = std::min(m, r.pv);
    }
    return m;
  };
  double reference = kInf;
  for (double eta : eta_grid) {
    reference = lower(eta);
    if (std::isfinite(reference)) break;
  }
  if (!(reference > 0.0) || !std::isfinite(reference)) {
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k].rel <= eta_grid.back() && !(rows[k].pv > 0.0)) env.failures.push_back(samples[k]);
    }
    if (env.failures.empty()) env.failures = samples;
    return env;
  }
  env.eta = eta_grid.front();
  env.c_nle = reference;
  for (double eta : eta_grid) {
    const double c = lower(eta);
    if (std::isfinite(c) && c >= options.nle_budget * reference) {
      env.eta = eta;
      env.c_nle = c;
    }
  }
  env.fitted = true;
  return env;
}

std::vector<Vertex> harnack_boundary(const GraphSpace& space, Vertex center, double r) {
  auto ball = DomainMask::ball(space, center, r);
  return outer_boundary(space, ball);
}

HarnackEstimate check_harnack(const GraphSpace& space, Vertex center, double r,
                              const std::vector<std::vector<double>>& boundary_data) {
  auto ball_vs = ball_vertices(space, center, r);
  require(ball_vs.size() >= 2, ErrorKind::geometry, "Harnack ball needs at least two interior vertices");
  auto ball = DomainMask::from_vertices(space, ball_vs);
  HarnackEstimate est;
  est.boundary = outer_boundary(space, ball);
  require(!est.boundary.empty(), ErrorKind::geometry, "Harnack ball has no boundary (covers the space)");
  auto half = ball_vertices(space, center, 0.5 * r);
  DirichletSolver solver(space, ball);
  for (const auto& data : boundary_data) {
    require(data.size() == est.boundary.size(), ErrorKind::domain, "boundary data has wrong length");
    std::vector<double> g(space.size(), 0.0);
    for (std::size_t k = 0; k < data.size(); ++k) {
      require(data[k] >= 0.0, ErrorKind::domain, "boundary data must be nonnegative");
      g[est.boundary[k]] = data[k];
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ball.size()));
    for (std::size_t i = 0; i < ball_vs.size(); ++i) {
      for (const auto& nb : space.neighbors(ball_vs[i])) {
        if (!ball.contains(nb.to)) rhs[static_cast<Eigen::Index>(i)] += nb.conductance * g[nb.to];
      }
    }
    Eigen::VectorXd h = solver.solve(rhs);
    double hi = -kInf, lo = kInf;
    for (Vertex z : half) {
      const double v = h[ball.local_index(z)];
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    if (hi <= 0.0) continue;  // identically zero data
    const double ratio = lo > 0.0 ? hi / lo : kInf;
    est.ratios.push_back(ratio);
    est.constant = std::max(est.constant, ratio);
  }
  return est;
}

double green_lower_ratio(const GraphSpace& space, const GeneratorSpectrum& whole,
                         const std::vector<GreenPairSample>& samples, double eta) {
  double inf = kInf;
  const auto& sc = space.scaling();
  for (const auto& s : samples) {
    require(space.distance(s.x, s.y) <= s.r, ErrorKind::domain, "sample needs d(x,y) <= r");
    const double T = truncation_time(sc, s.r, eta);
    inf = std::min(inf, green_truncated(whole, T, s.x, s.y) * volume(space, s.x, s.r) / sc.F(s.r));
  }
  return inf;
}

std::vector<double> green_ball_mass_ratios(const GraphSpace& space, const GeneratorSpectrum& whole,
                                           const std::vector<GreenBallSample>& samples, double eta) {
  std::vector<double> out;
  const auto& sc = space.scaling();
  for (const auto& s : samples) {
    auto ball = ball_vertices(space, s.x, s.r);
    require(!ball.empty(), ErrorKind::geometry, "empty ball");
    const double T = truncation_time(sc, s.r, eta);
    Eigen::MatrixXd g = green_truncated_block(whole, T, ball, ball);
    double sup = 0.0;
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      double mass = 0.0;
      for (Eigen::Index j = 0; j < g.cols(); ++j) mass += g(i, j) * space.measure(ball[static_cast<std::size_t>(j)]);
      sup = std::max(sup, mass);
    }
    out.push_back(sup / sc.F(s.r));
  }
  return out;
}

Band log_green_band(const GraphSpace& space, const GeneratorSpectrum& whole,
                    const std::vector<GreenPairSample>& samples, double eta) {
  Band band;
  const auto& sc = space.scaling();
  for (const auto& s : samples) {
    const double d = space.distance(s.x, s.y);
    require(d > 0.0 && d <= s.r, ErrorKind::domain, "log band samples need 0 < d(x,y) <= r");
    const double T = truncation_time(sc, s.r, eta);
    band.add(green_truncated(whole, T, s.x, s.y) / (std::log(s.r / d) + 1.0));
  }
  return band;
}

}  // namespace dlab
