#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dlab/error.hpp"
#include "dlab/inequalities.hpp"
#include "dlab/linalg.hpp"
#include "oracles.hpp"

using namespace dlab;

namespace {

Vertex center2(int n) {
  int c[2] = {n / 2, n / 2};
  return lattice_vertex(n, c);
}

// Potential W = -depth on the closed ball, shifted so that the ground state on
// omega has eigenvalue zero; returns (V, u).
std::pair<PotentialField, std::vector<double>> zero_energy_well(const GraphSpace& g, const DomainMask& omega,
                                                                Vertex c, double r, double depth) {
  std::vector<double> w(g.size(), 0.0);
  const auto ball = closed_ball(g, c, r);
  for (Vertex y : ball.vertices()) w[y] = -depth;
  PotentialField W(w);
  auto pe = principal_eigenvalue(g, omega, &W);
  return {W.shifted(-pe.lambda0), pe.phi1};
}

}  // namespace

TEST_CASE("hitting certificate on a path") {
  auto g = build_lattice(1, 41, false);
  auto whole = assemble_generator(g, DomainMask::whole(g));
  auto cert = hitting_certificate(g, whole, 20, {10, 11, 12}, 15.0);
  CHECK(cert.pass);
  CHECK(cert.T == doctest::Approx(std::pow(2 * 15.0 / kDefaultEta, 2)));
  CHECK(cert.volume_ratio == doctest::Approx(3.0 / 29.0));
  CHECK(cert.green_ratio_bound == doctest::Approx(1 / (2 * cert.double_integral)));
  CHECK(cert.green_ratio_bound <= cert.exact_prob + kBoundSlack);

  // exact probability from exp(-T H) on the complement of K
  std::vector<Vertex> free;
  for (Vertex x = 0; x < 41; ++x) {
    if (x < 10 || x > 12) free.push_back(x);
  }
  auto e = oracle::expm_neg(oracle::generator(g, free), cert.T);
  double survive = 0.0;
  const auto row = static_cast<std::size_t>(std::find(free.begin(), free.end(), 20) - free.begin());
  for (double v : e[row]) survive += v;
  CHECK(cert.exact_prob == doctest::Approx(1.0 - survive).epsilon(1e-8));

  CHECK(fit_hitting_constant({cert}) == doctest::Approx(cert.exact_prob / cert.volume_ratio));
  CHECK_THROWS_AS(fit_hitting_constant({}), Error);
}

TEST_CASE("hitting certificate hypotheses") {
  auto g = build_lattice(1, 41, false);
  auto whole = assemble_generator(g, DomainMask::whole(g));
  try {
    hitting_certificate(g, whole, 20, {19, 20}, 5.0);
    FAIL("o in K accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::instance);
  }
  CHECK_THROWS_AS(hitting_certificate(g, whole, 20, {30}, 5.0), Error);
}

TEST_CASE("hitting certificate on random gasket instances") {
  auto g = build_sierpinski_gasket(3);
  auto whole = assemble_generator(g, DomainMask::whole(g));
  int k = 0;
  for (Vertex o = 0; o < g.size(); o += 4) {
    auto d = g.distances_from(o);
    std::vector<Vertex> K;
    for (Vertex y = 0; y < g.size(); ++y) {
      if (d[y] > 0.1 && d[y] < 0.2 && K.size() < 3) K.push_back(y);
    }
    if (K.empty()) continue;
    auto cert = hitting_certificate(g, whole, o, K, 0.3);
    CHECK(cert.pass);
    CHECK(cert.exact_prob > 0.0);
    CHECK(cert.exact_prob <= 1.0 + 1e-12);
    ++k;
  }
  CHECK(k > 5);
}

TEST_CASE("hitting far from the target") {
  auto rep = hitting_far_bound(3, {9, 13, 17}, 1.0, 3, 3.0);
  REQUIRE(rep.sweep.size() == 3);
  for (const auto& p : rep.sweep) {
    CHECK(p.probability > 0.0);
    CHECK(p.probability < 1.0);
  }
  // larger absorbing boxes can only help
  CHECK(rep.sweep[1].probability > rep.sweep[0].probability);
  CHECK(rep.constant == doctest::Approx(rep.probability / rep.rate));
  CHECK_THROWS_AS(hitting_far_bound(3, {9}, 1.0, 1, 3.0), Error);

  auto box = build_lattice(2, 21, false);
  auto ann = annulus_hitting(box, center2(21), {2.0, 3.0, 4.0});
  REQUIRE(ann.size() == 3);
  for (const auto& a : ann) {
    CHECK(a.min_probability > 0.0);
    CHECK(a.min_probability < 1.0);
  }
}

TEST_CASE("Lieb coverage") {
  auto g = build_lattice(2, 24, false);
  const Vertex c = center2(24);
  auto omega = DomainMask::ball(g, c, 9.0);
  auto [V, u] = zero_energy_well(g, omega, c, 3.0, 1.0);
  std::vector<double> kappas;
  for (double k = 0.01; k < 1e4; k *= 1.5) kappas.push_back(k);
  auto rep = verify_lieb(g, omega, V, u, kappas, LiebRadius::sup_norm);
  CHECK(rep.o == c);
  CHECK(rep.residual < 1e-9);
  CHECK_FALSE(rep.degenerate);
  CHECK(rep.theta == doctest::Approx(V.theta(omega)));
  CHECK(rep.sweep.front().coverage == 1.0);
  CHECK(rep.sweep.back().coverage < 1.0);
  for (const auto& s : rep.sweep) CHECK(s.r == doctest::Approx(0.5 * kDefaultEta * std::sqrt(s.kappa / rep.theta)));
  double prev = 0.0;
  for (double eps : {0.0, 0.05, 0.2, 0.5, 0.9}) {
    const double k = lieb_kappa_star({rep}, eps);
    CHECK(k >= prev);
    prev = k;
  }
  auto lp = verify_lieb(g, omega, V, u, kappas, LiebRadius::lp_norm, kDefaultEta, 2.0);
  for (const auto& s : lp.sweep) CHECK(s.r == doctest::Approx(s.kappa * std::pow(lp.norm_p, -1.0)));
}

TEST_CASE("Lieb with a nonnegative potential is degenerate") {
  auto g = build_lattice(2, 10, false);
  auto omega = DomainMask::whole(g);
  std::vector<double> u(g.size(), 1.0);
  auto rep = verify_lieb(g, omega, PotentialField::zero(g.size()), u, {1.0, 10.0}, LiebRadius::sup_norm);
  CHECK(rep.degenerate);
  for (const auto& s : rep.sweep) {
    CHECK(s.r == kInf);
    CHECK(s.coverage == 1.0);
  }
}

TEST_CASE("Keller bounds") {
  auto g = build_lattice(2, 16, false);
  auto omega = DomainMask::ball(g, center2(16), 6.0);
  auto pos = keller_bounds(g, omega, PotentialField::constant(g.size(), 0.3), 2.0);
  CHECK(pos.lambda > 0.3);
  CHECK(pos.norm_p == 0.0);
  CHECK(pos.moment_ratio == 0.0);
  CHECK_THROWS_AS(keller_bounds(g, omega, PotentialField::zero(g.size()), 1.0), Error);

  const auto core = closed_ball(g, center2(16), 1.0);
  std::vector<Vertex> well(core.vertices().begin(), core.vertices().end());
  const double depth = critical_well_depth(g, omega, well);
  auto at = [&](double d) {
    std::vector<double> v(g.size(), 0.0);
    for (Vertex y : well) v[y] = -d;
    PotentialField V(v);
    return principal_eigenvalue(g, omega, &V).lambda0;
  };
  CHECK(at(depth * (1 - 1e-9)) > 0.0);
  CHECK(at(depth * (1 + 1e-9)) < 0.0);
  CHECK(std::abs(at(depth)) < 1e-9);

  std::vector<double> deep(g.size(), 0.0);
  for (Vertex y : well) deep[y] = -2 * depth;
  auto neg = keller_bounds(g, omega, PotentialField(deep), 2.0);
  CHECK(neg.lambda < 0.0);
  CHECK(neg.moment_ratio > 0.0);
  CHECK(neg.eta == doctest::Approx(0.5));
  CHECK(neg.product == doctest::Approx(std::pow(neg.measure, 0.5) * neg.norm_p));
}

TEST_CASE("supersolution checks") {
  auto g = build_lattice(2, 12, false);
  auto omega = DomainMask::ball(g, center2(12), 4.0);
  auto spec = assemble_generator(g, omega);
  std::vector<double> G(g.size(), 0.0);
  for (Vertex x : omega.vertices()) G[x] = green(spec, x, center2(12));
  SupersolutionInstance green_inst;
  green_inst.u = G;
  green_inst.omega = &omega;
  CHECK(check_supersolution(g, green_inst).pass);

  auto whole = DomainMask::whole(g);
  SupersolutionInstance flat;
  flat.u.assign(g.size(), 1.0);
  flat.omega = &whole;
  flat.V.assign(g.size(), 0.5);
  flat.p = 2.0;
  auto v = check_supersolution(g, flat);
  CHECK_FALSE(v.pass);
  CHECK(v.violations.size() == g.size());

  // equality: V = (-Laplacian u) / u^p
  SupersolutionInstance eq;
  eq.omega = &omega;
  eq.p = 1.5;
  eq.u = G;
  for (double& x : eq.u) x += 1.0;
  auto lu = negative_laplacian(g, eq.u);
  eq.V.assign(g.size(), 0.0);
  for (Vertex x : omega.vertices()) eq.V[x] = lu[x] / std::pow(eq.u[x], 1.5);
  CHECK(check_supersolution(g, eq).pass);
  eq.V[center2(12)] *= 1.001;
  CHECK_FALSE(check_supersolution(g, eq).pass);
}

TEST_CASE("Liouville profiles") {
  auto g = build_lattice(2, 33, false);
  const Vertex o = center2(33);
  auto interior = box_interior(g);
  std::vector<double> one(g.size(), 2.0);
  auto flat = liouville_profile(g, interior, one, o, {2, 4, 8});
  for (const auto& row : flat) {
    CHECK(row.M == 2.0);
    CHECK(row.kappa3 == 1.0);
  }
  auto h = hit_before_exit(g, interior, closed_ball(g, o, 1.0));
  auto rows = liouville_profile(g, interior, h, o, {2, 3, 4, 6, 8});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].M <= rows[i - 1].M);
  for (const auto& row : rows) {
    CHECK(row.kappa3 >= 1.0);
    CHECK(row.M2 <= row.M);
  }
  std::vector<double> bowl(g.size());
  auto d = g.distances_from(o);
  for (Vertex x = 0; x < g.size(); ++x) bowl[x] = d[x] * d[x];
  try {
    liouville_profile(g, interior, bowl, o, {2});
    FAIL("subharmonic u accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::instance);
  }
  auto pot = liouville_potential_profile(g, PotentialField::zero(g.size()), o, 0.5, {4, 8}, 3);
  for (const auto& row : pot) {
    CHECK(row.psi_inf == 0.0);
    CHECK(row.ratio == 0.0);
    CHECK(row.annulus_points > 0);
  }
}

TEST_CASE("Liouville potential profile against direct solves") {
  auto g = build_lattice(2, 21, false);
  const Vertex o = center2(21);
  auto V = PotentialField::constant(g.size(), 1.0);
  auto rows = liouville_potential_profile(g, V, o, 0.5, {4.0});
  REQUIRE(rows.size() == 1);
  // with V = 1, Psi(x, r) is the mean exit time of B(x, r - 1)
  double want = kInf;
  auto d = g.distances_from(o);
  for (Vertex x = 0; x < g.size(); ++x) {
    if (d[x] >= 2.0 && d[x] <= 4.0) want = std::min(want, exact_mean_exit(g, DomainMask::ball(g, x, 3.0))[x]);
  }
  CHECK(rows[0].psi_inf == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("recurrent Liouville check") {
  auto refl = recurrent_liouville_check(2, {16, 24}, 1.0, 4, OuterBoundary::reflecting);
  for (const auto& row : refl.rows) CHECK(row.probability == doctest::Approx(1.0).epsilon(1e-10));
  auto abs = recurrent_liouville_check(2, {16, 32, 64}, 1.0, 4, OuterBoundary::absorbing);
  CHECK(abs.increasing);
  CHECK(abs.final_probability < 1.0);
  CHECK(abs.final_probability == abs.rows.back().probability);
  auto three = recurrent_liouville_check(3, {16, 32}, 1.0, 4, OuterBoundary::absorbing);
  CHECK(three.final_probability < 0.9);
}

TEST_CASE("local Faber-Krahn certificate") {
  auto g = build_lattice(2, 20, false);
  auto omega = box_interior(g);
  std::vector<double> u(g.size(), 1.0);
  try {
    local_fk_certificate(g, omega, PotentialField::zero(g.size()), u);
    FAIL("V = 0 accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::instance);
  }
  auto [V, phi] = zero_energy_well(g, omega, center2(20), 2.0, 2.0);
  auto rep = local_fk_certificate(g, omega, V, phi);
  CHECK(rep.u_ratio == 1.0);
  CHECK(rep.p == doctest::Approx(1.0));
  CHECK(rep.radius == doctest::Approx(std::sqrt(rep.median.time)));
  std::vector<Vertex> support;
  for (Vertex y : ball_vertices(g, rep.o, rep.radius)) {
    if (omega.contains(y)) support.push_back(y);
  }
  CHECK(rep.max_norm >= lorentz_norm(V.negative_part(), g.measures(), support, rep.p, LorentzSecond::one) - 1e-12);
}
