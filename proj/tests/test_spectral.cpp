#include <doctest.h>

#include <cmath>
#include <random>

#include "dlab/error.hpp"
#include "dlab/spectral.hpp"
#include "oracles.hpp"

using namespace dlab;

namespace {

std::vector<Vertex> range(Vertex a, Vertex b) {
  std::vector<Vertex> v;
  for (Vertex x = a; x <= b; ++x) v.push_back(x);
  return v;
}

// Brute-force same-sign radius straight from the definition.
double radius_oracle(const GraphSpace& g, const std::vector<double>& u) {
  double best = 0.0;
  for (Vertex z = 0; z < g.size(); ++z) {
    if (u[z] == 0.0) continue;
    auto d = g.distances_from(z);
    double nearest = kInf;
    for (Vertex y = 0; y < g.size(); ++y) {
      if (u[y] * u[z] <= 0.0) nearest = std::min(nearest, d[y]);
    }
    best = std::max(best, nearest);
  }
  return best;
}

std::vector<Vertex> violations_oracle(const GraphSpace& g, const DomainMask& dom, const std::vector<double>& u,
                                      double rho) {
  std::vector<Vertex> out;
  for (Vertex z : dom.vertices()) {
    auto d = g.distances_from(z);
    bool inside = true, pos = true, neg = true;
    for (Vertex y = 0; y < g.size(); ++y) {
      if (d[y] >= rho) continue;
      inside = inside && dom.contains(y);
      pos = pos && u[y] > 0.0;
      neg = neg && u[y] < 0.0;
    }
    if (inside && (pos || neg)) out.push_back(z);
  }
  return out;
}

}  // namespace

TEST_CASE("Feynman-Kac semigroup against the matrix exponential") {
  auto g = build_sierpinski_gasket(2);
  auto dom_v = range(1, 11);
  auto dom = DomainMask::from_vertices(g, dom_v);
  std::vector<double> vals(g.size());
  for (Vertex x = 0; x < g.size(); ++x) vals[x] = 0.3 * std::sin(1.0 + x);
  PotentialField V(vals);
  auto spec = assemble_generator(g, dom, &V);
  auto e = oracle::expm_neg(oracle::generator(g, dom_v, vals), 0.8);
  std::vector<double> u(g.size());
  for (Vertex x = 0; x < g.size(); ++x) u[x] = 1.0 + 0.1 * x;
  auto tu = feynman_kac_apply(g, spec, 0.8, u);
  for (Vertex x = 0; x < g.size(); ++x) {
    if (!dom.contains(x)) {
      CHECK(tu[x] == 0.0);
      continue;
    }
    double want = 0.0;
    const auto i = static_cast<std::size_t>(dom.local_index(x));
    for (std::size_t j = 0; j < dom_v.size(); ++j) want += e[i][j] * u[dom_v[j]];
    CHECK(tu[x] == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("Feynman-Kac semigroup invariants") {
  auto g = build_lattice(2, 8, false);
  auto whole = assemble_generator(g, DomainMask::whole(g));
  std::vector<double> one(g.size(), 1.0);
  for (double t : {0.0, 0.5, 4.0}) {
    for (double v : feynman_kac_apply(g, whole, t, one)) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  }
  auto dom = DomainMask::ball(g, 27, 3.0);
  auto killed = assemble_generator(g, dom);
  std::vector<double> u(g.size());
  for (Vertex x = 0; x < g.size(); ++x) u[x] = dom.contains(x) ? std::cos(0.3 * x) : 0.0;
  auto t0 = feynman_kac_apply(g, killed, 0.0, u);
  for (Vertex x = 0; x < g.size(); ++x) CHECK(t0[x] == doctest::Approx(u[x]).scale(1.0).epsilon(1e-12));
  auto a = feynman_kac_apply(g, killed, 0.7, feynman_kac_apply(g, killed, 0.4, u));
  auto b = feynman_kac_apply(g, killed, 1.1, u);
  for (Vertex x = 0; x < g.size(); ++x) CHECK(a[x] == doctest::Approx(b[x]).scale(1.0).epsilon(1e-12));
  // positivity preserving, contraction in sup norm
  auto c = feynman_kac_apply(g, killed, 1.0, one);
  for (double v : c) {
    CHECK(v >= -1e-14);
    CHECK(v <= 1.0 + 1e-12);
  }
}

TEST_CASE("principal eigenvalue of a path segment") {
  auto g = build_lattice(1, 30, false);
  for (Vertex n : {1u, 2u, 5u, 17u}) {
    auto dom = DomainMask::from_vertices(g, range(3, 2 + n));
    auto pe = principal_eigenvalue(g, dom);
    CHECK(pe.lambda0 == doctest::Approx(2 * (1 - std::cos(M_PI / (n + 1)))).epsilon(1e-12));
    CHECK_FALSE(pe.degenerate);
    CHECK(relative_residual(g, dom, nullptr, pe.phi1, pe.lambda0) < 1e-10);
    for (Vertex x : dom.vertices()) CHECK(pe.phi1[x] > 0.0);
  }
}

TEST_CASE("principal eigenvalue of one vertex is its jump rate plus V") {
  auto g = build_sierpinski_gasket(3);
  auto V = PotentialField::constant(g.size(), -0.25);
  for (Vertex x : {0u, 5u, 20u}) {
    auto pe = principal_eigenvalue(g, DomainMask::from_vertices(g, {x}), &V);
    CHECK(pe.lambda0 == doctest::Approx(g.jump_rate(x) - 0.25).epsilon(1e-12));
  }
}

TEST_CASE("components are solved separately") {
  auto g = build_lattice(1, 20, false);
  auto two = DomainMask::from_vertices(g, {2, 3, 4, 10, 11, 12, 13, 14});
  auto pe = principal_eigenvalue(g, two);
  REQUIRE(pe.components.size() == 2);
  CHECK(pe.lambda0 == doctest::Approx(2 * (1 - std::cos(M_PI / 6))));
  for (Vertex x : {2u, 3u, 4u}) CHECK(pe.phi1[x] == 0.0);
  for (Vertex x : {10u, 12u, 14u}) CHECK(pe.phi1[x] > 0.0);
  auto twin = principal_eigenvalue(g, DomainMask::from_vertices(g, {2, 3, 4, 10, 11, 12}));
  CHECK(twin.degenerate);
}

TEST_CASE("domain monotonicity of the principal eigenvalue") {
  auto g = build_sierpinski_gasket(4);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<Vertex> pick(0, g.size() - 1);
  std::uniform_real_distribution<double> rad(0.1, 0.4);
  std::vector<double> vals(g.size());
  for (Vertex x = 0; x < g.size(); ++x) vals[x] = std::sin(0.7 * x);
  PotentialField V(vals);
  for (int k = 0; k < 50; ++k) {
    const Vertex c = pick(rng);
    const double r = rad(rng);
    auto big = DomainMask::ball(g, c, r);
    std::vector<Vertex> sub;
    for (Vertex x : big.vertices()) {
      if (g.distance(c, x) < 0.6 * r) sub.push_back(x);
    }
    auto small = DomainMask::from_vertices(g, sub);
    CHECK(principal_eigenvalue(g, small, &V).lambda0 >= principal_eigenvalue(g, big, &V).lambda0 - 1e-12);
  }
}

TEST_CASE("ball eigenvalues times F(r) on the path") {
  auto g = build_lattice(1, 200, false);
  std::vector<BallSpec> balls;
  for (double r : {2.0, 4.0, 8.0, 16.0, 32.0}) balls.push_back({100, r});
  auto rep = eigenvalue_ball_bound(g, balls);
  REQUIRE(rep.balls.size() == 5);
  CHECK(rep.min_product >= 2.0);
  CHECK(rep.max_product <= 12.0);
  for (std::size_t i = 1; i < rep.balls.size(); ++i) CHECK(rep.balls[i].lambda < rep.balls[i - 1].lambda);
  // open ball of integer radius r holds 2r - 1 vertices
  CHECK(rep.balls[2].lambda == doctest::Approx(2 * (1 - std::cos(M_PI / 16))).epsilon(1e-12));
}

TEST_CASE("Faber-Krahn functional") {
  auto g = build_lattice(2, 21, false);
  int c[2] = {10, 10};
  const Vertex o = lattice_vertex(21, c);
  auto ball = DomainMask::ball(g, o, 6.0);
  const double lam = principal_eigenvalue(g, ball).lambda0;
  CHECK(faber_krahn_functional(g, {o, 6.0}, ball, 1.0) == doctest::Approx(lam * 36.0));
  auto part = DomainMask::ball(g, o, 3.0);
  const double v = faber_krahn_functional(g, {o, 6.0}, part, 1.0);
  CHECK(v == doctest::Approx(principal_eigenvalue(g, part).lambda0 * 36.0 * part.measure(g) / ball.measure(g)));
  CHECK_THROWS_AS(faber_krahn_functional(g, {o, 2.0}, part, 1.0), Error);
  CHECK(default_fk_exponent(g.scaling()) == doctest::Approx(1.0));
}

TEST_CASE("designated eigenpairs solve the equation") {
  auto g = build_sierpinski_gasket(3);
  std::vector<double> vals(g.size());
  for (Vertex x = 0; x < g.size(); ++x) vals[x] = x % 3 == 0 ? -2.0 : 0.5;
  PotentialField V(vals);
  auto dom = DomainMask::ball(g, 10, 0.4);
  auto spec = assemble_generator(g, dom, &V);
  for (std::size_t k : {0u, 1u, 4u}) {
    auto s = eigen_solution(g, spec, &V, k);
    CHECK(s.lambda == doctest::Approx(spec.eigenvalue(k)));
    CHECK(s.residual < 1e-10);
    CHECK(relative_residual(g, dom, &V, s.u, s.lambda) == doctest::Approx(s.residual).scale(1e-10));
  }
}

TEST_CASE("same-sign radius and wavelength violations agree with brute force") {
  auto g = build_lattice(2, 12, false);
  auto dom = DomainMask::from_vertices(g, range(13, 130));
  auto spec = assemble_generator(g, dom);
  for (std::size_t k : {0u, 1u, 3u, 6u}) {
    auto u = spec.mode_function(k);
    const double rho = same_sign_radius(g, u);
    CHECK(rho == radius_oracle(g, u));
    for (double r : {rho * 0.5, rho, rho + 1.0}) {
      CHECK(wavelength_violations(g, dom, u, r) == violations_oracle(g, dom, u, r));
    }
    CHECK(wavelength_violations(g, dom, u, rho + 1e-9).empty());
  }
}
