// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Suite artifacts go under the directory given as argv[1].
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dlab/error.hpp"
#include "dlab/inequalities.hpp"
#include "dlab/runner.hpp"
#include "../oracles.hpp"

using namespace dlab;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

fs::path g_root;
int g_failures = 0;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void criterion(int id, const std::string& name, double budget_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("raised: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0 && secs > budget_s) {
    v.pass = false;
    v.detail += "; over the " + fmt("%.0f", budget_s) + " s budget";
  }
  if (!v.pass) ++g_failures;
  std::printf("[%s] %2d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str(), secs);
  std::fflush(stdout);
}

// Runs a suite the way `verify` does and keeps the result for inspection.
SuiteResult run_config(const std::string& text, const std::string& dir) {
  auto cfg = parse_suite_config("", text);
  auto result = run_suite(cfg);
  write_artifacts(result, fnv1a_hex(cfg.document.dump()), (g_root / dir).string());
  return result;
}

std::string describe(const SuiteResult& r) {
  std::ostringstream s;
  std::size_t bad = 0;
  for (const auto& i : r.instances) bad += !i.pass;
  s << r.instances.size() - bad << "/" << r.instances.size() << " instances";
  for (const auto& c : r.checks) {
    s << "; " << c.name << (c.pass ? " ok" : " FAILED");
    if (c.limit != 0.0 || c.value != 0.0) s << " (" << c.value << " vs " << c.limit << ")";
  }
  return s.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

const char* kHittingConfig =
    R"({"suite": "hitting", "spaces": ["gasket:5", "lattice:2:48"], "instances": 100, "seed": 7})";

Vertex lattice_point(int n, std::vector<int> c) { return lattice_vertex(n, c); }

struct ScaleSample {
  const GraphSpace* space;
  Vertex x;
  double r;
};

std::vector<GraphSpace> gaskets() {
  std::vector<GraphSpace> out;
  for (int l = 3; l <= 6; ++l) out.push_back(build_sierpinski_gasket(l));
  return out;
}

// Dyadic radii from twice the shortest edge up to 1/4, at four centres.
std::vector<ScaleSample> gasket_samples(const std::vector<GraphSpace>& gs) {
  std::vector<ScaleSample> s;
  for (const auto& g : gs) {
    for (Vertex x : {Vertex{0}, g.size() / 3, g.size() / 2, 2 * g.size() / 3}) {
      for (double r = 2 * g.min_edge_length(); r <= 0.25 + 1e-12; r *= 2) s.push_back({&g, x, r});
    }
  }
  return s;
}

std::vector<ScaleSample> lattice_samples(const GraphSpace& g, int n, int dim, int offset, std::vector<double> radii) {
  std::vector<ScaleSample> s;
  const int c = n / 2;
  std::vector<std::vector<int>> centres;
  if (dim == 2) {
    centres = {{c, c}, {c + offset, c}, {c, c - offset}};
  } else {
    centres = {{c, c, c}, {c + offset, c, c}, {c, c - offset, c + offset}};
  }
  for (const auto& p : centres) {
    for (double r : radii) s.push_back({&g, lattice_point(n, p), r});
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  g_root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "dlab-acceptance";
  fs::create_directories(g_root);

  criterion(1, "gambler's ruin on {0..100} from 30", 5.0, [] {
    auto g = build_lattice(1, 101, false);
    std::vector<Vertex> inner;
    for (Vertex x = 1; x <= 99; ++x) inner.push_back(x);
    auto dom = DomainMask::from_vertices(g, inner);
    // h(k) = P_k(absorbed at 0): h = (h(k-1) + h(k+1)) / 2 with h(0) = 1, h(100) = 0
    oracle::Matrix a = oracle::zeros(99);
    std::vector<double> b(99, 0.0);
    for (std::size_t i = 0; i < 99; ++i) {
      a[i][i] = 2.0;
      if (i > 0) a[i][i - 1] = -1.0;
      if (i + 1 < 99) a[i][i + 1] = -1.0;
    }
    b[0] = 1.0;
    const double exact = oracle::solve(a, b)[29];
    StopRule rule;
    rule.domain = &dom;
    auto recs = simulate_paths(g, 30, rule, {20240601, 100000});
    std::vector<double> hit;
    for (const auto& r : recs) hit.push_back(r.terminal == 0 ? 1.0 : 0.0);
    auto est = summarize(hit);
    const double z = std::abs(est.mean - exact) / est.std_error;
    return Verdict{std::abs(exact - 0.7) < 1e-12 && z <= 3.0,
                   "mc " + fmt("%.5f", est.mean) + ", exact " + fmt("%.12f", exact) + ", |z| " + fmt("%.2f", z)};
  });

  criterion(2, "hitting certificates, gasket level 5 and 48x48 box", 120.0, [] {
    auto r = run_config(kHittingConfig, "hitting");
    std::size_t ok = 0;
    for (const auto& i : r.instances) ok += i.pass;
    return Verdict{r.pass() && r.instances.size() == 200 && ok == 200, describe(r)};
  });

  criterion(3, "mean exit time scaling bands", 60.0, [] {
    auto gs = gaskets();
    auto sq = build_lattice(2, 65, false);
    auto cube = build_lattice(3, 41, false);
    std::vector<std::pair<std::string, std::vector<ScaleSample>>> families{
        {"gasket 3-6", gasket_samples(gs)},
        {"2D box", lattice_samples(sq, 65, 2, 8, {2, 4, 8, 16})},
        {"3D box", lattice_samples(cube, 41, 3, 4, {2, 4, 8, 16})}};
    bool pass = true;
    std::string detail;
    for (const auto& [name, samples] : families) {
      Band band;
      for (const auto& s : samples) {
        auto ball = DomainMask::ball(*s.space, s.x, s.r);
        band.add(exact_mean_exit(*s.space, ball)[s.x] / s.space->scaling().F(s.r));
      }
      pass = pass && band.spread() <= 5.0;
      detail += (detail.empty() ? "" : "; ") + name + " band " + fmt("%.3f", band.spread()) + " over " +
                std::to_string(samples.size());
    }
    return Verdict{pass, detail};
  });

  criterion(4, "ball eigenvalue times F(r) bands", 60.0, [] {
    auto gs = gaskets();
    auto sq = build_lattice(2, 65, false);
    bool pass = true;
    std::string detail;
    auto run = [&](const std::string& name, const std::vector<ScaleSample>& samples) {
      double lo = kInf, hi = 0.0;
      for (const auto& s : samples) {
        auto rep = eigenvalue_ball_bound(*s.space, {{s.x, s.r}});
        lo = std::min(lo, rep.min_product);
        hi = std::max(hi, rep.max_product);
      }
      pass = pass && hi / lo <= 10.0;
      detail += (detail.empty() ? "" : "; ") + name + " band " + fmt("%.3f", hi / lo);
    };
    run("gasket 3-6", gasket_samples(gs));
    run("2D box", lattice_samples(sq, 65, 2, 8, {2, 4, 8, 16}));
    return Verdict{pass, detail};
  });

  criterion(5, "Lieb coverage suite, 30 instances on 48x48", 180.0, [] {
    auto r = run_config(R"({"suite": "lieb", "space": "lattice:2:48", "instances": 30, "seed": 11, "epsilon": 0.5})",
                        "lieb");
    return Verdict{r.pass() && r.instances.size() == 30, describe(r)};
  });

  criterion(6, "Keller suite, p = 2 on 32x32 and 48x48", 120.0, [] {
    auto r = run_config(R"({"suite": "keller", "spaces": ["lattice:2:32", "lattice:2:48"], "seed": 5, "p": 2})",
                        "keller");
    return Verdict{r.pass(), describe(r)};
  });

  criterion(7, "wavelength density, 20 eigenpairs", 120.0, [] {
    auto r = run_config(
        R"({"suite": "wavelength", "space": "lattice:2:48", "domains": 4, "eigenpairs": 5, "seed": 3})",
        "wavelength");
    return Verdict{r.pass() && r.instances.size() == 20, describe(r)};
  });

  criterion(8, "Liouville profiles and recurrent check", 180.0, [] {
    auto l = run_config(R"({"suite": "liouville", "dim": 3, "extents": [16, 24, 32]})", "liouville");
    auto r = run_config(R"({"suite": "recurrent", "dim": 2, "extents": [16, 32, 64], "final_min": 0.99,
                            "control_max": 0.9})",
                        "recurrent");
    return Verdict{l.pass() && r.pass(), "liouville: " + describe(l) + " | recurrent: " + describe(r)};
  });

  criterion(9, "local Faber-Krahn suite, 3D boxes", 300.0, [] {
    auto r = run_config(R"({"suite": "fk-local", "spaces": ["lattice:3:16", "lattice:3:20", "lattice:3:24"],
                            "instances": 30, "seed": 9})",
                        "fk-local");
    return Verdict{r.pass(), describe(r)};
  });

  criterion(10, "special functions", 10.0, [] {
    double ml = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double x = i * 0.01;
      ml = std::max(ml, std::abs(mittag_leffler(1.0, x) - std::exp(x)) / std::exp(x));
    }
    double lor = 0.0;
    auto g = build_sierpinski_gasket(4);
    auto box = build_lattice(2, 20, false);
    for (const GraphSpace* s : {&g, &box}) {
      for (Vertex c : {Vertex{0}, s->size() / 2}) {
        for (double r : {2 * s->min_edge_length(), 6 * s->min_edge_length()}) {
          auto ball = ball_vertices(*s, c, r);
          double mu = 0.0;
          for (Vertex y : ball) mu += s->measure(y);
          std::vector<double> one(s->size(), 1.0);
          for (double p : {1.0, 1.5, 2.0, 3.0}) {
            const double v = lorentz_norm(one, s->measures(), ball, p, LorentzSecond::one);
            lor = std::max(lor, std::abs(v - p * std::pow(mu, 1 / p)) / (p * std::pow(mu, 1 / p)));
          }
        }
      }
    }
    int held = 0;
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<GraphSpace> spaces{build_sierpinski_gasket(3), build_lattice(2, 10, false), build_lattice(1, 30, true)};
    for (int k = 0; k < 20; ++k) {
      const auto& s = spaces[k % 3];
      const double t = 0.2 + 2 * u(rng);
      std::vector<double> v(s.size());
      for (double& x : v) x = u(rng) < 0.5 ? 0.0 : 0.9 * u(rng) / t;
      auto whole = assemble_generator(s, DomainMask::whole(s));
      auto chk = khasminskii_check(s, whole, PotentialField(v), t);
      held += chk.c < 1.0 && chk.exp_moment <= chk.bound + 1e-9;
    }
    return Verdict{ml <= 1e-12 && lor <= 1e-12 && held == 20,
                   "ML_1 rel err " + fmt("%.2e", ml) + ", indicator Lorentz rel err " + fmt("%.2e", lor) +
                       ", Khasminskii " + std::to_string(held) + "/20"};
  });

  criterion(11, "heat kernel invariants and Phi", 60.0, [] {
    std::vector<GraphSpace> spaces;
    for (int l = 0; l <= 6; ++l) spaces.push_back(build_sierpinski_gasket(l));
    spaces.push_back(build_lattice(1, 64, false));
    spaces.push_back(build_lattice(1, 40, true));
    spaces.push_back(build_lattice(2, 24, false));
    spaces.push_back(build_lattice(2, 16, true));
    spaces.push_back(build_lattice(3, 10, false));
    double sym = 0.0, semi = 0.0, mass = 0.0, dom = -kInf;
    std::mt19937_64 rng(5);
    for (const auto& g : spaces) {
      auto whole = assemble_generator(g, DomainMask::whole(g));
      const Vertex c = g.size() / 2;
      auto ball = DomainMask::ball(g, c, 0.3 * g.diameter_estimate());
      auto killed = assemble_generator(g, ball);
      std::uniform_int_distribution<Vertex> pick(0, g.size() - 1);
      for (int k = 0; k < 8; ++k) {
        const double t = 0.05 * std::pow(4.0, k % 4), s = 0.1 * (1 + k);
        const Vertex x = pick(rng), y = pick(rng);
        const double pxy = heat_kernel(whole, t, x, y);
        const double scale = heat_kernel(whole, t, x, x);
        sym = std::max(sym, std::abs(pxy - heat_kernel(whole, t, y, x)) / scale);
        double conv = 0.0, m = 0.0;
        for (Vertex z = 0; z < g.size(); ++z) {
          const double pxz = heat_kernel(whole, t, x, z);
          conv += pxz * heat_kernel(whole, s, z, y) * g.measure(z);
          m += pxz * g.measure(z);
        }
        semi = std::max(semi, std::abs(conv - heat_kernel(whole, t + s, x, y)) / heat_kernel(whole, t + s, x, x));
        mass = std::max(mass, std::abs(m - 1.0));
        auto verts = ball.vertices();
        for (std::size_t i = 0; i < verts.size(); i += std::max<std::size_t>(1, verts.size() / 12)) {
          for (std::size_t j = 0; j < verts.size(); j += std::max<std::size_t>(1, verts.size() / 12)) {
            dom = std::max(dom, (heat_kernel(killed, t, verts[i], verts[j]) - heat_kernel(whole, t, verts[i], verts[j])) /
                                    scale);
          }
        }
      }
    }
    double phi_err = 0.0;
    for (double beta : {1.5, 2.0, std::log(5.0) / std::log(2.0), 3.0}) {
      auto law = ScalingLaw::make(1.0, 1.0, beta);
      for (int i = 0; i < 60; ++i) {
        const double s = std::pow(10.0, -4.0 + 8.0 * i / 59);
        const double a = phi(law, s);
        phi_err = std::max(phi_err, std::abs(a - phi_grid_sup(law, s)) / a);
      }
    }
    const bool pass = sym <= 1e-10 && semi <= 1e-8 && mass <= 1e-10 && dom <= 1e-12 && phi_err <= 1e-6;
    return Verdict{pass, std::to_string(spaces.size()) + " spaces; symmetry " + fmt("%.1e", sym) + ", semigroup " +
                             fmt("%.1e", semi) + ", mass " + fmt("%.1e", mass) + ", domination excess " +
                             fmt("%.1e", dom) + ", Phi rel err " + fmt("%.1e", phi_err)};
  });

  criterion(12, "Feynman-Kac Monte Carlo vs spectral on 16x16", 120.0, [] {
    auto g = build_lattice(2, 16, false);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int ok = 0;
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const Vertex c = lattice_point(16, {4 + static_cast<int>(8 * u(rng)), 4 + static_cast<int>(8 * u(rng))});
      auto dom = k % 2 ? box_interior(g) : DomainMask::ball(g, c, 4.0 + 4 * u(rng));
      std::vector<double> v(g.size()), f(g.size());
      for (Vertex x = 0; x < g.size(); ++x) {
        v[x] = -0.5 + 1.5 * u(rng);
        f[x] = 0.5 + u(rng);
      }
      PotentialField V(v);
      const double t = 0.5 + 2.5 * u(rng);
      auto spec = assemble_generator(g, dom, &V);
      const double want = feynman_kac_apply(g, spec, t, f)[c];
      auto mc = feynman_kac_mc(g, dom, V, f, c, t, {static_cast<std::uint64_t>(1000 + k), 100000});
      const double z = std::abs(mc.estimate - want) / mc.std_error;
      worst = std::max(worst, z);
      ok += z <= 3.0;
    }
    return Verdict{ok == 10, std::to_string(ok) + "/10 within 3 sigma, worst |z| " + fmt("%.2f", worst)};
  });

  criterion(13, "determinism of summary.csv", 0.0, [] {
    const auto first = g_root / "hitting" / "summary.csv";
    if (!fs::exists(first)) run_config(kHittingConfig, "hitting");
    run_config(kHittingConfig, "hitting-repeat");
    const auto a = slurp(first), b = slurp(g_root / "hitting-repeat" / "summary.csv");
    return Verdict{!a.empty() && a == b, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "differ")};
  });

  std::printf("%d of 13 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
