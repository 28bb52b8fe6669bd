#include "dlab/stochastic.hpp"

#include <algorithm>
#include <cmath>

#include "dlab/error.hpp"

namespace dlab {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Eigen::VectorXd ones_on(const DomainMask& domain) {
  return Eigen::VectorXd::Ones(static_cast<Eigen::Index>(domain.size()));
}

}  // namespace

PathRng::PathRng(std::uint64_t seed, std::uint64_t path)
    : state_(mix64(seed ^ 0x6A09E667F3BCC909ULL) ^ mix64(path + 0x9E3779B97F4A7C15ULL)) {}

std::uint64_t PathRng::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return mix64(state_);
}

std::vector<PathRecord> simulate_paths(const GraphSpace& space, Vertex start, const StopRule& rule,
                                       const WalkConfig& cfg) {
  require(start < space.size(), ErrorKind::domain, "start vertex out of range");
  require(cfg.n_paths >= 1, ErrorKind::domain, "need at least one path");
  require(rule.horizon >= 0.0, ErrorKind::domain, "horizon must be nonnegative");
  require(!rule.potential || rule.potential->size() == space.size(), ErrorKind::domain,
          "potential has wrong length");
  // per-vertex tables keep the jump loop free of mask and measure lookups
  enum : std::uint8_t { go = 0, hit = 1, exited = 2, isolated = 3 };
  const std::size_t n = space.size();
  std::vector<std::uint8_t> stop(n, go);
  std::vector<double> mean_hold(n);
  // neighbours in CSR form with cumulative conductances
  std::vector<std::size_t> first(n + 1, 0);
  std::vector<double> cum;
  std::vector<Vertex> to;
  for (Vertex x = 0; x < n; ++x) {
    double c = 0.0;
    for (const auto& nb : space.neighbors(x)) {
      c += nb.conductance;
      cum.push_back(c);
      to.push_back(nb.to);
    }
    first[x + 1] = cum.size();
  }
  for (Vertex x = 0; x < n; ++x) {
    if (rule.target && rule.target->contains(x)) {
      stop[x] = hit;
    } else if (rule.domain && !rule.domain->contains(x)) {
      stop[x] = exited;
    }
    mean_hold[x] = 1.0 / space.jump_rate(x);
    if (stop[x] == go && first[x] == first[x + 1]) stop[x] = isolated;
  }
  const std::vector<double> zero(rule.potential ? 0 : n, 0.0);
  const double* V = rule.potential ? rule.potential->values().data() : zero.data();

  std::vector<PathRecord> out(cfg.n_paths);
  for (std::size_t k = 0; k < cfg.n_paths; ++k) {
    PathRng rng(cfg.seed, k);
    PathRecord& rec = out[k];
    Vertex x = start;
    double t = 0.0, integral = 0.0;
    std::size_t events = 0;
    for (;;) {
      if (stop[x] == isolated) {
        // no jumps ever: the path sits at x until the horizon
        if (rule.horizon < kInf) {
          integral += V[x] * (rule.horizon - t);
          t = rule.horizon;
          rec.reason = StopReason::horizon;
        } else {
          rec.reason = StopReason::truncated;
        }
        break;
      }
      if (stop[x] != go) {
        rec.reason = stop[x] == hit ? StopReason::hit : StopReason::exited;
        break;
      }
      if (events++ >= cfg.max_events) {
        rec.reason = StopReason::truncated;
        break;
      }
      const double hold = rng.unit_exponential() * mean_hold[x];
      if (t + hold >= rule.horizon) {
        integral += V[x] * (rule.horizon - t);
        t = rule.horizon;
        rec.reason = StopReason::horizon;
        break;
      }
      integral += V[x] * hold;
      t += hold;
      // branchless: count the cumulative weights at or below the pick
      const std::size_t lo = first[x], hi = first[x + 1];
      const double pick = rng.uniform() * cum[hi - 1];
      std::size_t j = lo;
      for (std::size_t i = lo; i + 1 < hi; ++i) j += pick >= cum[i];
      x = to[j];
    }
    rec.time = t;
    rec.terminal = x;
    rec.integral = integral;
  }
  return out;
}

MeanEstimate summarize(const std::vector<double>& samples, std::size_t excluded) {
  MeanEstimate e;
  e.n = samples.size();
  e.excluded = excluded;
  if (samples.empty()) return e;
  double s = 0.0;
  for (double v : samples) s += v;
  e.mean = s / static_cast<double>(e.n);
  if (e.n > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - e.mean) * (v - e.mean);
    e.std_error = std::sqrt(ss / static_cast<double>(e.n - 1) / static_cast<double>(e.n));
  }
  return e;
}

std::vector<double> exact_mean_exit(const GraphSpace& space, const DomainMask& domain) {
  require(!domain.is_whole(), ErrorKind::recurrence, "mean exit time from the whole space is infinite");
  DirichletSolver solver(space, domain);
  auto verts = domain.vertices();
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(verts.size()));
  for (std::size_t i = 0; i < verts.size(); ++i) rhs[static_cast<Eigen::Index>(i)] = space.measure(verts[i]);
  Eigen::VectorXd m = solver.solve(rhs);
  std::vector<double> out(space.size(), 0.0);
  for (std::size_t i = 0; i < verts.size(); ++i) out[verts[i]] = m[static_cast<Eigen::Index>(i)];
  return out;
}

SurvivalSolver::SurvivalSolver(const GraphSpace& space, const DomainMask& domain, const PotentialField* potential)
    : space_(&space), domain_(domain) {
  if (domain.size() <= kSpectralLimit) {
    spectrum_.emplace(assemble_generator(space, domain, potential));
    auto verts = domain.vertices();
    Eigen::VectorXd mu(static_cast<Eigen::Index>(verts.size()));
    for (std::size_t i = 0; i < verts.size(); ++i) mu[static_cast<Eigen::Index>(i)] = space.measure(verts[i]);
    coeff_ = spectrum_->modes().transpose() * mu;
  } else {
    uniform_.emplace(space, domain, potential);
  }
}

double SurvivalSolver::survival(double t, Vertex x) const {
  require(t >= 0.0, ErrorKind::domain, "time must be nonnegative");
  const auto i = domain_.local_index(x);
  if (i < 0) return 0.0;
  if (spectrum_) {
    const auto& lam = spectrum_->eigenvalues();
    const auto row = spectrum_->modes().row(i);
    double s = 0.0;
    for (Eigen::Index n = 0; n < lam.size(); ++n) s += std::exp(-lam[n] * t) * coeff_[n] * row[n];
    return s;
  }
  return uniform_->apply(t, ones_on(domain_))[i];
}

std::vector<double> SurvivalSolver::survival(double t) const {
  require(t >= 0.0, ErrorKind::domain, "time must be nonnegative");
  Eigen::VectorXd local;
  if (spectrum_) {
    Eigen::VectorXd c = coeff_;
    for (Eigen::Index n = 0; n < c.size(); ++n) c[n] *= std::exp(-spectrum_->eigenvalues()[n] * t);
    local = spectrum_->modes() * c;
  } else {
    local = uniform_->apply(t, ones_on(domain_));
  }
  std::vector<double> out(space_->size(), 0.0);
  auto verts = domain_.vertices();
  for (std::size_t i = 0; i < verts.size(); ++i) out[verts[i]] = local[static_cast<Eigen::Index>(i)];
  return out;
}

HittingProbability exact_hitting_prob_by_time(const GraphSpace& space, const DomainMask& target, Vertex o,
                                              double T) {
  require(T >= 0.0, ErrorKind::domain, "deadline must be nonnegative");
  require(o < space.size(), ErrorKind::domain, "start vertex out of range");
  if (target.contains(o)) return {1.0, true};
  SurvivalSolver solver(space, target.complement());
  const double s = solver.survival(T, o);
  return {std::clamp(1.0 - s, 0.0, 1.0), false};
}

HittingEstimate hitting_mc(const GraphSpace& space, const DomainMask& target, Vertex o, double T,
                           const WalkConfig& cfg) {
  StopRule rule;
  rule.target = &target;
  rule.horizon = T;
  auto paths = simulate_paths(space, o, rule, cfg);
  std::vector<double> hits;
  hits.reserve(paths.size());
  std::size_t truncated = 0;
  for (const auto& p : paths) {
    if (p.reason == StopReason::truncated) {
      ++truncated;
      continue;
    }
    hits.push_back(p.reason == StopReason::hit ? 1.0 : 0.0);
  }
  auto s = summarize(hits, truncated);
  return {s.mean, s.std_error, s.n, T};
}

MedianExit median_exit_time(const GraphSpace& space, const DomainMask& domain, Vertex o) {
  require(domain.contains(o), ErrorKind::domain, "start must lie in the domain");
  const double mean = exact_mean_exit(space, domain)[o];
  SurvivalSolver solver(space, domain);
  auto cdf = [&](double t) { return 1.0 - solver.survival(t, o); };
  double lo = 0.0, hi = 2.0 * mean;
  double f_hi = cdf(hi);
  while (f_hi < 0.5) {  // only reachable through rounding
    lo = hi;
    hi *= 2.0;
    f_hi = cdf(hi);
  }
  double f_lo = 0.0;
  const double tol = 1e-6 * 2.0 * mean;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f = cdf(mid);
    if (f >= 0.5) {
      hi = mid;
      f_hi = f;
    } else {
      lo = mid;
      f_lo = f;
    }
  }
  double qmax = 0.0;
  for (Vertex x : domain.vertices()) qmax = std::max(qmax, space.jump_rate(x));
  return {hi, lo, f_hi, f_lo, qmax * (hi - lo)};
}

FeynmanKacEstimate feynman_kac_mc(const GraphSpace& space, const DomainMask& domain, const PotentialField& potential,
                                  const std::vector<double>& u, Vertex x, double t, const WalkConfig& cfg) {
  require(u.size() == space.size(), ErrorKind::domain, "vertex function has wrong length");
  StopRule rule;
  rule.domain = &domain;
  rule.horizon = t;
  rule.potential = &potential;
  auto paths = simulate_paths(space, x, rule, cfg);
  std::vector<double> values;
  values.reserve(paths.size());
  std::size_t truncated = 0;
  for (const auto& p : paths) {
    if (p.reason == StopReason::truncated) {
      ++truncated;
      continue;
    }
    values.push_back(p.reason == StopReason::horizon ? std::exp(-p.integral) * u[p.terminal] : 0.0);
  }
  auto s = summarize(values, truncated);
  return {s.mean, s.std_error, s.n, truncated};
}

std::vector<double> hit_before_exit(const GraphSpace& space, const DomainMask& region, const DomainMask& target) {
  std::vector<double> h(space.size(), 0.0);
  std::vector<Vertex> free;
  for (Vertex x : region.vertices()) {
    if (!target.contains(x)) free.push_back(x);
  }
  for (Vertex x : target.vertices()) h[x] = 1.0;
  if (free.empty()) return h;
  auto mask = DomainMask::from_vertices(space, free);
  DirichletSolver solver(space, mask);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(free.size()));
  for (std::size_t i = 0; i < free.size(); ++i) {
    for (const auto& nb : space.neighbors(free[i])) {
      if (target.contains(nb.to)) rhs[static_cast<Eigen::Index>(i)] += nb.conductance;
    }
  }
  Eigen::VectorXd sol = solver.solve(rhs);
  for (std::size_t i = 0; i < free.size(); ++i) h[free[i]] = sol[static_cast<Eigen::Index>(i)];
  return h;
}

KhasminskiiCheck khasminskii_check(const GraphSpace& space, const GeneratorSpectrum& whole,
                                   const PotentialField& potential, double t) {
  require(whole.domain().is_whole(), ErrorKind::domain, "needs the whole-space spectrum");
  require(t >= 0.0, ErrorKind::domain, "time must be nonnegative");
  for (double v : potential.values()) require(v >= 0.0, ErrorKind::domain, "potential must be nonnegative");
  const auto n = static_cast<Eigen::Index>(space.size());
  Eigen::VectorXd vmu(n), mu(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    mu[i] = space.measure(static_cast<Vertex>(i));
    vmu[i] = potential[static_cast<Vertex>(i)] * mu[i];
  }
  KhasminskiiCheck out;
  Eigen::VectorXd a = whole.modes().transpose() * vmu;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double lam = whole.eigenvalues()[k];
    const double x = lam * t;
    a[k] *= std::abs(x) < 1e-8 ? t * (1.0 - 0.5 * x) : -std::expm1(-x) / lam;
  }
  out.c = (whole.modes() * a).maxCoeff();

  std::vector<double> neg(potential.values());
  for (double& v : neg) v = -v;
  PotentialField minus(std::move(neg));
  auto spec = assemble_generator(space, whole.domain(), &minus);
  Eigen::VectorXd b = spec.modes().transpose() * mu;
  for (Eigen::Index k = 0; k < b.size(); ++k) b[k] *= std::exp(-spec.eigenvalues()[k] * t);
  out.exp_moment = (spec.modes() * b).maxCoeff();
  out.bound = out.c < 1.0 ? 1.0 / (1.0 - out.c) : kInf;
  out.holds = out.exp_moment <= out.bound + 1e-9;
  return out;
}

}  // namespace dlab
