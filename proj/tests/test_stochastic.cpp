#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dlab/error.hpp"
#include "dlab/inequalities.hpp"
#include "dlab/stochastic.hpp"
#include "oracles.hpp"

using namespace dlab;

namespace {

std::vector<Vertex> range(Vertex a, Vertex b) {
  std::vector<Vertex> v;
  for (Vertex x = a; x <= b; ++x) v.push_back(x);
  return v;
}

GraphSpace two_vertices(double mu0) {
  return GraphSpace("pair", {mu0, 1.0}, {{0, 1, 1.0, 1.0}}, ScalingLaw::make(1, 1, 2));
}

std::vector<double> times_of(const std::vector<PathRecord>& recs) {
  std::vector<double> t;
  for (const auto& r : recs) t.push_back(r.time);
  return t;
}

}  // namespace

TEST_CASE("holding time at a vertex is exponential with rate deg / mu") {
  auto g = two_vertices(0.5);
  auto dom = DomainMask::from_vertices(g, {0});
  StopRule rule;
  rule.domain = &dom;
  auto recs = simulate_paths(g, 0, rule, {7, 20000});
  auto est = summarize(times_of(recs));
  CHECK(std::abs(est.mean - 0.5) < 5 * est.std_error);
  for (const auto& r : recs) {
    CHECK(r.reason == StopReason::exited);
    CHECK(r.terminal == 1);
  }
}

TEST_CASE("gambler's ruin") {
  auto g = build_lattice(1, 11, false);
  auto dom = DomainMask::from_vertices(g, range(1, 9));
  StopRule rule;
  rule.domain = &dom;
  auto recs = simulate_paths(g, 7, rule, {3, 20000});
  std::vector<double> won;
  for (const auto& r : recs) won.push_back(r.terminal == 10 ? 1.0 : 0.0);
  auto est = summarize(won);
  CHECK(std::abs(est.mean - 0.7) < 5 * est.std_error);
  auto h = hit_before_exit(g, DomainMask::from_vertices(g, range(1, 10)), DomainMask::from_vertices(g, {10}));
  for (Vertex k = 0; k <= 10; ++k) CHECK(h[k] == doctest::Approx(k / 10.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("start inside the target stops at time zero") {
  auto g = build_sierpinski_gasket(2);
  auto K = DomainMask::from_vertices(g, {4, 5});
  StopRule rule;
  rule.target = &K;
  for (const auto& r : simulate_paths(g, 4, rule, {1, 10})) {
    CHECK(r.time == 0.0);
    CHECK(r.reason == StopReason::hit);
  }
}

TEST_CASE("paths are reproducible by seed and index") {
  auto g = build_lattice(2, 9, false);
  auto dom = DomainMask::ball(g, 40, 3.0);
  StopRule rule;
  rule.domain = &dom;
  auto a = simulate_paths(g, 40, rule, {99, 50});
  auto b = simulate_paths(g, 40, rule, {99, 80});
  auto c = simulate_paths(g, 40, rule, {100, 50});
  for (std::size_t i = 0; i < 50; ++i) CHECK(a[i].time == b[i].time);
  int same = 0;
  for (std::size_t i = 0; i < 50; ++i) same += a[i].time == c[i].time;
  CHECK(same < 5);
  PathRng r1(5, 3), r2(5, 3);
  for (int i = 0; i < 100; ++i) CHECK(r1.next() == r2.next());
}

TEST_CASE("horizon and truncation") {
  auto g = build_lattice(1, 9, true);
  StopRule rule;
  rule.horizon = 2.5;
  for (const auto& r : simulate_paths(g, 0, rule, {1, 100})) {
    CHECK(r.time == 2.5);
    CHECK(r.reason == StopReason::horizon);
  }
  WalkConfig cfg{1, 10, 3};
  rule.horizon = kInf;
  auto dom = DomainMask::from_vertices(g, range(0, 7));
  rule.domain = &dom;
  auto recs = simulate_paths(g, 3, rule, cfg);
  std::size_t trunc = 0;
  for (const auto& r : recs) trunc += r.reason == StopReason::truncated;
  CHECK(trunc > 0);
}

TEST_CASE("mean exit time of a path segment") {
  const Vertex N = 40;
  auto g = build_lattice(1, N + 1, false);
  auto dom_v = range(1, N - 1);
  auto m = exact_mean_exit(g, DomainMask::from_vertices(g, dom_v));
  for (Vertex k = 0; k <= N; ++k) CHECK(m[k] == doctest::Approx(k * (N - k) / 2.0).scale(1.0).epsilon(1e-10));
  // against an independent solve on the gasket
  auto gs = build_sierpinski_gasket(3);
  auto dv = range(3, 30);
  auto mg = exact_mean_exit(gs, DomainMask::from_vertices(gs, dv));
  auto sol = oracle::solve(oracle::generator(gs, dv), std::vector<double>(dv.size(), 1.0));
  for (std::size_t i = 0; i < dv.size(); ++i) CHECK(mg[dv[i]] == doctest::Approx(sol[i]).epsilon(1e-10));
}

TEST_CASE("mean exit on a domain large enough for the iterative solver") {
  // 21^3 interior vertices: past the direct-solve limit
  auto g = build_lattice(3, 23, false);
  std::vector<Vertex> inner;
  for (Vertex x = 0; x < g.size(); ++x) {
    if (g.degree(x) == 6) inner.push_back(x);
  }
  REQUIRE(inner.size() == 9261);
  auto m = exact_mean_exit(g, DomainMask::from_vertices(g, inner));
  // residual of -Laplacian m = 1 with m = 0 off the domain
  double worst = 0.0;
  for (Vertex x : inner) {
    double lap = 0.0;
    for (const auto& nb : g.neighbors(x)) lap += nb.conductance * (m[x] - m[nb.to]);
    worst = std::max(worst, std::abs(lap / g.measure(x) - 1.0));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("mean exit of a single vertex; recurrence on the whole space") {
  auto g = build_lattice(2, 7, false);
  auto m = exact_mean_exit(g, DomainMask::from_vertices(g, {24}));
  CHECK(m[24] == doctest::Approx(0.25));
  try {
    exact_mean_exit(g, DomainMask::whole(g));
    FAIL("expected recurrence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::recurrence);
  }
}

TEST_CASE("median exit time") {
  auto g = build_lattice(2, 7, false);
  auto single = median_exit_time(g, DomainMask::from_vertices(g, {24}), 24);
  CHECK(single.time == doctest::Approx(std::log(2.0) / 4).epsilon(1e-6));

  auto gs = build_sierpinski_gasket(4);
  auto dom = DomainMask::ball(gs, 30, 0.3);
  const auto mean = exact_mean_exit(gs, dom);
  SurvivalSolver surv(gs, dom);
  for (Vertex o : {dom.vertices()[0], dom.vertices()[dom.size() / 2]}) {
    auto med = median_exit_time(gs, dom, o);
    CHECK(med.prob_at_time >= 0.5);
    CHECK(med.prob_at_lower < 0.5);
    CHECK(med.lower < med.time);
    CHECK(med.time - med.lower <= 1e-6 * 2 * mean[o] * (1 + 1e-9));
    CHECK(med.quantum == doctest::Approx(gs.max_jump_rate() * (med.time - med.lower)));
    CHECK(1.0 - surv.survival(med.time, o) == doctest::Approx(med.prob_at_time).epsilon(1e-10));
    // Markov: P(tau > t) <= E tau / t, so T(o) <= 2 E tau
    CHECK(med.time <= 2 * mean[o]);
  }
}

TEST_CASE("Monte Carlo mean exit agrees with the exact solve") {
  auto g = build_sierpinski_gasket(3);
  auto dom = DomainMask::ball(g, 12, 0.45);
  auto exact = exact_mean_exit(g, dom);
  StopRule rule;
  rule.domain = &dom;
  int k = 0;
  for (Vertex x : dom.vertices()) {
    if (k++ % 2) continue;
    if (k > 20) break;
    auto est = summarize(times_of(simulate_paths(g, x, rule, {static_cast<std::uint64_t>(k), 4000})));
    CHECK(std::abs(est.mean - exact[x]) < 5 * est.std_error);
  }
}

TEST_CASE("exact hitting probability by a deadline") {
  auto g = build_lattice(1, 20, false);
  auto K = DomainMask::from_vertices(g, {15, 16});
  CHECK(exact_hitting_prob_by_time(g, K, 5, 0.0).value == 0.0);
  CHECK(exact_hitting_prob_by_time(g, K, 5, 1e5).value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(exact_hitting_prob_by_time(g, K, 15, 1.0).degenerate);
  double prev = 0.0;
  for (double T = 1.0; T < 500.0; T *= 1.7) {
    const double p = exact_hitting_prob_by_time(g, K, 5, T).value;
    CHECK(p >= prev - 1e-14);
    CHECK(p <= exact_hitting_prob_by_time(g, DomainMask::from_vertices(g, {14, 15, 16}), 5, T).value + 1e-14);
    prev = p;
  }
  auto mc = hitting_mc(g, K, 5, 60.0, {21, 20000});
  CHECK(std::abs(mc.probability - exact_hitting_prob_by_time(g, K, 5, 60.0).value) < 5 * mc.std_error);
}

TEST_CASE("survival function: spectral and uniformization paths") {
  auto gs = build_sierpinski_gasket(2);
  auto dv = range(2, 13);
  auto e = oracle::expm_neg(oracle::generator(gs, dv), 1.3);
  SurvivalSolver small(gs, DomainMask::from_vertices(gs, dv));
  CHECK(small.spectral());
  for (std::size_t i = 0; i < dv.size(); ++i) {
    double want = 0.0;
    for (double v : e[i]) want += v;
    CHECK(small.survival(1.3, dv[i]) == doctest::Approx(want).epsilon(1e-10));
  }

  auto g = build_lattice(2, 30, false);
  auto dom = box_interior(g);
  SurvivalSolver big(g, dom);
  CHECK_FALSE(big.spectral());
  auto spec = assemble_generator(g, dom);
  for (double t : {0.5, 5.0, 40.0}) {
    auto s = big.survival(t);
    for (Vertex x : {dom.vertices()[0], dom.vertices()[400]}) {
      double want = 0.0;
      for (std::size_t n = 0; n < spec.size(); ++n) {
        double c = 0.0;
        for (Vertex y : dom.vertices()) c += spec.mode(n, y) * g.measure(y);
        want += std::exp(-spec.eigenvalue(n) * t) * c * spec.mode(n, x);
      }
      CHECK(s[x] == doctest::Approx(want).epsilon(1e-9));
    }
  }
}

TEST_CASE("Feynman-Kac Monte Carlo") {
  auto g = build_sierpinski_gasket(3);
  auto dom = DomainMask::ball(g, 12, 0.5);
  std::vector<double> one(g.size(), 1.0);
  SurvivalSolver surv(g, dom);
  const Vertex x = dom.vertices()[3];
  auto zero = feynman_kac_mc(g, dom, PotentialField::zero(g.size()), one, x, 0.05, {4, 20000});
  CHECK(std::abs(zero.estimate - surv.survival(0.05, x)) < 5 * zero.std_error + 1e-12);
  auto c = feynman_kac_mc(g, dom, PotentialField::constant(g.size(), 3.0), one, x, 0.05, {4, 20000});
  CHECK(c.estimate == doctest::Approx(std::exp(-0.15) * zero.estimate).epsilon(1e-12));
}

TEST_CASE("Khasminskii check with a constant potential") {
  auto g = build_lattice(2, 6, true);
  auto whole = assemble_generator(g, DomainMask::whole(g));
  auto k = khasminskii_check(g, whole, PotentialField::constant(g.size(), 0.5), 1.0);
  CHECK(k.c == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(k.exp_moment == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
  CHECK(k.bound == doctest::Approx(2.0));
  CHECK(k.holds);
  auto big = khasminskii_check(g, whole, PotentialField::constant(g.size(), 1.5), 1.0);
  CHECK(big.bound == kInf);
  CHECK_THROWS_AS(khasminskii_check(g, whole, PotentialField::constant(g.size(), -1.0), 1.0), Error);
}
