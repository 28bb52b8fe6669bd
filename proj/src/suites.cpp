#include "dlab/suites.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "dlab/error.hpp"

namespace dlab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Deterministic draws for one generated instance.
class Draw {
 public:
  Draw(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
  int integer(int lo, int hi) {  // inclusive
    const int v = lo + static_cast<int>(rng_.uniform() * (hi - lo + 1));
    return std::min(v, hi);
  }
  std::size_t index(std::size_t n) { return std::min(n - 1, static_cast<std::size_t>(rng_.uniform() * n)); }

 private:
  PathRng rng_;
};

std::uint64_t stream_id(std::size_t group, std::size_t item) {
  return (static_cast<std::uint64_t>(group) << 32) + item;
}

// Axis-aligned sub-box of a lattice, kept one step away from the faces.
struct SubBox {
  std::array<int, 3> lo{};
  std::array<int, 3> side{1, 1, 1};
};

SubBox draw_subbox(Draw& draw, int dim, int extent, int side_min, int side_max) {
  SubBox b;
  for (int k = 0; k < dim; ++k) {
    const int s = draw.integer(side_min, std::min(side_max, extent - 2));
    b.side[static_cast<std::size_t>(k)] = s;
    b.lo[static_cast<std::size_t>(k)] = draw.integer(1, extent - 1 - s);
  }
  return b;
}

std::vector<Vertex> subbox_vertices(int dim, int extent, const SubBox& b, bool l_shape = false) {
  std::vector<Vertex> out;
  std::array<int, 3> c{};
  const int nz = dim >= 3 ? b.side[2] : 1;
  const int ny = dim >= 2 ? b.side[1] : 1;
  for (int z = 0; z < nz; ++z) {
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < b.side[0]; ++x) {
        if (l_shape && x >= b.side[0] / 2 && y >= ny / 2) continue;
        c = {b.lo[0] + x, b.lo[1] + y, b.lo[2] + z};
        out.push_back(lattice_vertex(extent, std::span<const int>(c.data(), static_cast<std::size_t>(dim))));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Json subbox_json(int dim, const SubBox& b) {
  Json lo = Json::array(), side = Json::array();
  for (int k = 0; k < dim; ++k) {
    lo.push_back(b.lo[static_cast<std::size_t>(k)]);
    side.push_back(b.side[static_cast<std::size_t>(k)]);
  }
  return {{"lo", lo}, {"side", side}};
}

std::vector<Vertex> well_vertices(const GraphSpace& space, const DomainMask& omega, Vertex center, double radius) {
  std::vector<Vertex> out;
  const auto ball = closed_ball(space, center, radius);
  for (Vertex y : ball.vertices()) {
    if (omega.contains(y)) out.push_back(y);
  }
  return out;
}

PotentialField well_potential(std::size_t n, const std::vector<Vertex>& well, double value) {
  std::vector<double> v(n, 0.0);
  for (Vertex x : well) v[x] = value;
  return PotentialField(std::move(v));
}

std::string error_text(const Error& e) { return std::string(to_string(e.kind())) + ": " + e.what(); }

template <class Fn>
InstanceRecord evaluate(std::string tag, Json inputs, Fn&& fn) {
  InstanceRecord rec;
  rec.tag = std::move(tag);
  rec.inputs = std::move(inputs);
  seal(rec);
  const auto t0 = Clock::now();
  try {
    fn(rec);
  } catch (const Error& e) {
    rec.error = error_text(e);
    rec.pass = false;
  }
  rec.runtime = seconds_since(t0);
  return rec;
}

SuiteCheck band_check(const std::string& name, double lo, double hi, double limit) {
  SuiteCheck c;
  c.name = name;
  c.value = (lo > 0.0 && std::isfinite(hi)) ? hi / lo : kInf;
  c.limit = limit;
  c.pass = c.value <= limit;
  c.note = "max/min";
  return c;
}

SuiteCheck count_check(const std::string& name, std::size_t failures) {
  SuiteCheck c;
  c.name = name;
  c.value = static_cast<double>(failures);
  c.limit = 0.0;
  c.pass = failures == 0;
  c.note = "failing instances";
  return c;
}

std::vector<double> default_kappas() {
  std::vector<double> k;
  for (int i = 0; i <= 60; ++i) k.push_back(std::pow(10.0, -2.0 + 6.0 * i / 60.0));
  return k;
}

Json vertex_list(const std::vector<Vertex>& vs) {
  Json a = Json::array();
  for (Vertex v : vs) a.push_back(v);
  return a;
}

}  // namespace

std::string SpaceSpec::label() const {
  std::ostringstream s;
  if (kind == "gasket") {
    s << "gasket:" << level;
  } else if (kind == "path") {
    s << "path:" << extent;
  } else {
    s << "lattice:" << dim << ":" << extent << (periodic ? ":periodic" : "");
  }
  return s.str();
}

Json SpaceSpec::to_json() const {
  if (kind == "gasket") return {{"kind", kind}, {"level", level}};
  if (kind == "path") return {{"kind", kind}, {"extent", extent}};
  return {{"kind", kind}, {"dim", dim}, {"extent", extent}, {"periodic", periodic}};
}

SpaceSpec parse_space_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  auto number = [&](std::size_t i) {
    require(i < parts.size(), ErrorKind::parse, "space spec '" + text + "' is missing a field");
    try {
      std::size_t used = 0;
      const int v = std::stoi(parts[i], &used);
      require(used == parts[i].size(), ErrorKind::parse, "bad integer '" + parts[i] + "' in space spec");
      return v;
    } catch (const std::logic_error&) {
      fail(ErrorKind::parse, "bad integer '" + parts[i] + "' in space spec '" + text + "'");
    }
  };
  require(!parts.empty(), ErrorKind::parse, "empty space spec");
  SpaceSpec s;
  s.kind = parts[0];
  if (s.kind == "gasket") {
    s.level = number(1);
    require(parts.size() == 2, ErrorKind::parse, "gasket spec is gasket:<level>");
  } else if (s.kind == "path") {
    s.dim = 1;
    s.extent = number(1);
    require(parts.size() == 2, ErrorKind::parse, "path spec is path:<vertices>");
  } else if (s.kind == "lattice") {
    s.dim = number(1);
    s.extent = number(2);
    if (parts.size() == 4) {
      require(parts[3] == "periodic", ErrorKind::parse, "lattice spec suffix must be 'periodic'");
      s.periodic = true;
    } else {
      require(parts.size() == 3, ErrorKind::parse, "lattice spec is lattice:<dim>:<extent>[:periodic]");
    }
  } else {
    fail(ErrorKind::parse, "unknown space kind '" + s.kind + "'");
  }
  return s;
}

SpaceSpec space_spec_from_json(const Json& j) {
  if (j.is_string()) return parse_space_spec(j.get<std::string>());
  require(j.is_object(), ErrorKind::parse, "space must be a string or an object");
  require(j.contains("kind") && j["kind"].is_string(), ErrorKind::parse, "space needs a string 'kind'");
  SpaceSpec s;
  s.kind = j["kind"].get<std::string>();
  auto integer = [&](const char* key) {
    require(j.contains(key) && j[key].is_number_integer(), ErrorKind::parse,
            std::string("space field '") + key + "' must be an integer");
    return j[key].get<int>();
  };
  if (s.kind == "gasket") {
    s.level = integer("level");
  } else if (s.kind == "path") {
    s.extent = integer("extent");
  } else if (s.kind == "lattice") {
    s.dim = integer("dim");
    s.extent = integer("extent");
    if (j.contains("periodic")) {
      require(j["periodic"].is_boolean(), ErrorKind::parse, "space field 'periodic' must be a boolean");
      s.periodic = j["periodic"].get<bool>();
    }
  } else {
    fail(ErrorKind::parse, "unknown space kind '" + s.kind + "'");
  }
  return s;
}

GraphSpace build_space(const SpaceSpec& spec) {
  if (spec.kind == "gasket") {
    require(spec.level >= 0, ErrorKind::domain, "gasket level must be nonnegative");
    require(spec.level <= 10, ErrorKind::size, "gasket level above 10");
    return build_sierpinski_gasket(spec.level);
  }
  if (spec.kind == "path") return build_lattice(1, spec.extent, false);
  return build_lattice(spec.dim, spec.extent, spec.periodic);
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void seal(InstanceRecord& rec) { rec.digest = fnv1a_hex(Json{{"tag", rec.tag}, {"inputs", rec.inputs}}.dump()); }

bool SuiteResult::pass() const {
  for (const auto& i : instances) {
    if (!i.pass) return false;
  }
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::vector<std::string> SuiteResult::failing_digests() const {
  std::vector<std::string> out;
  for (const auto& i : instances) {
    if (!i.pass) out.push_back(i.digest);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- hitting

SuiteResult run_hitting_suite(const HittingParams& params) {
  require(!params.spaces.empty(), ErrorKind::domain, "hitting suite needs at least one space");
  SuiteResult res;
  res.kind = "hitting";
  std::vector<GraphSpace> spaces;
  std::vector<GeneratorSpectrum> spectra;
  for (const auto& s : params.spaces) {
    spaces.push_back(build_space(s));
    spectra.push_back(assemble_generator(spaces.back(), DomainMask::whole(spaces.back())));
  }
  std::vector<std::vector<HittingCertificate>> certs(spaces.size());
  std::vector<std::vector<std::size_t>> owners(spaces.size());

  auto run_one = [&](std::size_t si, Vertex o, std::vector<Vertex> K, double r) {
    Json inputs = {{"space", params.spaces[si].label()}, {"o", o}, {"K", vertex_list(K)}, {"r", r},
                   {"eta", params.eta}};
    auto rec = evaluate("hitting", inputs, [&](InstanceRecord& rec) {
      auto c = hitting_certificate(spaces[si], spectra[si], o, K, r, params.eta);
      rec.lhs = c.green_ratio_bound;
      rec.rhs = c.exact_prob;
      rec.pass = c.pass;
      rec.details = {{"T", c.T}, {"double_integral", c.double_integral}, {"volume_ratio", c.volume_ratio},
                     {"slack", c.exact_prob - c.green_ratio_bound}};
      certs[si].push_back(c);
      owners[si].push_back(res.instances.size());
    });
    res.instances.push_back(std::move(rec));
  };

  for (std::size_t si = 0; si < spaces.size(); ++si) {
    const auto& space = spaces[si];
    const double edge = space.min_edge_length();
    for (std::size_t i = 0; i < params.instances; ++i) {
      Draw draw(params.seed, stream_id(si, i));
      for (int attempt = 0; attempt < 100; ++attempt) {
        const Vertex o = draw.index(space.size());
        const double r = draw.uniform(params.r_min, params.r_max) * edge;
        auto ball = ball_vertices(space, o, r);
        std::erase(ball, o);
        if (ball.empty()) continue;
        const Vertex z = ball[draw.index(ball.size())];
        const double s = draw.uniform(0.5, params.target_radius_max) * edge;
        std::vector<Vertex> K;
        auto dz = space.distances_from(z, s);
        for (Vertex y : ball) {
          if (dz[y] < s) K.push_back(y);
        }
        if (K.empty()) continue;
        run_one(si, o, std::move(K), r);
        break;
      }
    }
  }
  for (const auto& e : params.explicit_instances) {
    require(e.space < spaces.size(), ErrorKind::parse, "explicit instance refers to a missing space");
    run_one(e.space, e.o, e.K, e.r);
  }

  std::size_t green_fail = 0;
  for (const auto& rec : res.instances) {
    if (!rec.pass) ++green_fail;
  }
  res.checks.push_back(count_check("green_ratio_bound<=exact", green_fail));

  PlotSpec plot{"hitting.svg", "Hitting probability against the Green-ratio bound", "exact probability",
                "Green-ratio bound", true, true, {}};
  Json c1s = Json::object();
  for (std::size_t si = 0; si < spaces.size(); ++si) {
    if (certs[si].empty()) continue;
    const double c1 = fit_hitting_constant(certs[si]);
    c1s[params.spaces[si].label()] = c1;
    std::size_t vol_fail = 0;
    Series s{params.spaces[si].label(), {}, {}, false};
    for (std::size_t k = 0; k < certs[si].size(); ++k) {
      const auto& c = certs[si][k];
      const double vb = c1 * c.volume_ratio;
      auto& rec = res.instances[owners[si][k]];
      rec.constants["C1"] = c1;
      rec.details["volume_bound"] = vb;
      if (vb > c.exact_prob + kBoundSlack) ++vol_fail;
      if (c.exact_prob > 0.0 && c.green_ratio_bound > 0.0) {
        s.x.push_back(c.exact_prob);
        s.y.push_back(c.green_ratio_bound);
      }
    }
    res.checks.push_back(count_check("volume_bound<=exact@" + params.spaces[si].label(), vol_fail));
    plot.series.push_back(std::move(s));
  }
  res.summary["C1"] = c1s;
  res.summary["eta"] = params.eta;
  plot.series.push_back({"bound = exact", {1e-6, 1.0}, {1e-6, 1.0}, true});
  res.plots.push_back(std::move(plot));
  return res;
}

// ---------------------------------------------------------------- Lieb

SuiteResult run_lieb_suite(const LiebParams& params) {
  require(params.space.kind == "lattice" && params.space.dim == 2, ErrorKind::domain,
          "Lieb suite generates sub-rectangles of a 2D lattice");
  SuiteResult res;
  res.kind = "lieb";
  auto space = build_space(params.space);
  const auto kappas = params.kappas.empty() ? default_kappas() : params.kappas;
  std::vector<LiebReport> sup_reports, lp_reports;
  std::vector<std::size_t> owners;
  for (std::size_t i = 0; i < params.instances; ++i) {
    Draw draw(params.seed, stream_id(0, i));
    auto box = draw_subbox(draw, 2, params.space.extent, params.side_min, params.side_max);
    auto omega = DomainMask::from_vertices(space, subbox_vertices(2, params.space.extent, box));
    const Vertex wc = omega.vertices()[draw.index(omega.size())];
    const double wr = draw.uniform(params.well_radius_min, params.well_radius_max);
    const double depth = draw.uniform(params.depth_min, params.depth_max);
    const int mode = draw.integer(0, params.max_mode);
    Json inputs = {{"space", params.space.label()}, {"omega", subbox_json(2, box)}, {"well_center", wc},
                   {"well_radius", wr}, {"depth", depth}, {"mode", mode}};
    auto rec = evaluate("lieb", inputs, [&](InstanceRecord& rec) {
      auto well = well_vertices(space, omega, wc, wr);
      auto W = well_potential(space.size(), well, -depth);
      auto spec = assemble_generator(space, omega, &W);
      const auto k = static_cast<std::size_t>(std::min<int>(mode, static_cast<int>(spec.size()) - 1));
      auto u = spec.mode_function(k);
      auto V = W.shifted(-spec.eigenvalue(k));
      auto sup = verify_lieb(space, omega, V, u, kappas, LiebRadius::sup_norm, params.eta, params.p);
      auto lp = verify_lieb(space, omega, V, u, kappas, LiebRadius::lp_norm, params.eta, params.p);
      rec.details = {{"o", sup.o},           {"theta", sup.theta},       {"norm_p", sup.norm_p},
                     {"residual", sup.residual}, {"lambda", spec.eigenvalue(k)}, {"omega_size", omega.size()}};
      rec.pass = sup.residual <= 1e-8;
      sup_reports.push_back(std::move(sup));
      lp_reports.push_back(std::move(lp));
      owners.push_back(res.instances.size());
    });
    res.instances.push_back(std::move(rec));
  }
  if (sup_reports.empty()) {
    res.checks.push_back(count_check("instances", res.instances.size()));
    return res;
  }

  Json tradeoff = Json::array();
  Series s_sup{"sup-norm radius", {}, {}, true}, s_lp{"Lp radius", {}, {}, true};
  bool monotone = true;
  double prev_sup = 0.0, prev_lp = 0.0;
  auto eps = params.epsilons;
  std::sort(eps.begin(), eps.end());
  for (double e : eps) {
    const double ks = lieb_kappa_star(sup_reports, e), kl = lieb_kappa_star(lp_reports, e);
    tradeoff.push_back({{"epsilon", e}, {"kappa_sup", ks}, {"kappa_lp", kl}});
    monotone = monotone && ks >= prev_sup && kl >= prev_lp;
    prev_sup = ks;
    prev_lp = kl;
    s_sup.x.push_back(e);
    s_sup.y.push_back(ks);
    s_lp.x.push_back(e);
    s_lp.y.push_back(kl);
  }
  const double ks = lieb_kappa_star(sup_reports, params.epsilon);
  const double kl = lieb_kappa_star(lp_reports, params.epsilon);
  for (std::size_t k = 0; k < owners.size(); ++k) {
    auto& rec = res.instances[owners[k]];
    const auto& sw = sup_reports[k].sweep;
    auto at = std::find_if(sw.begin(), sw.end(), [&](const LiebCoverage& c) { return c.kappa == ks; });
    rec.lhs = at != sw.end() ? at->coverage : 0.0;
    rec.rhs = 1.0 - params.epsilon;
    rec.constants = {{"kappa", ks}, {"kappa_lp", kl}};
    if (at != sw.end()) rec.details["r"] = at->r;
    rec.pass = rec.pass && at != sw.end() && rec.lhs >= rec.rhs - 1e-12;
  }
  SuiteCheck single{"single_kappa_covers_all", ks > 0.0, ks, 0.0, "largest passing kappa (sup-norm radius)"};
  SuiteCheck single_lp{"single_kappa_covers_all_lp", kl > 0.0, kl, 0.0, "largest passing kappa (Lp radius)"};
  SuiteCheck mono{"kappa_epsilon_monotone", monotone, 0.0, 0.0, "kappa*(epsilon) nondecreasing in epsilon"};
  res.checks = {single, single_lp, mono};
  res.summary = {{"epsilon", params.epsilon}, {"kappa_star", ks}, {"kappa_star_lp", kl}, {"tradeoff", tradeoff}};

  PlotSpec cov{"lieb_coverage.svg", "Smallest coverage over the suite", "kappa", "coverage", true, false, {}};
  for (auto* reps : {&sup_reports, &lp_reports}) {
    Series s{reps == &sup_reports ? "sup-norm radius" : "Lp radius", {}, {}, true};
    for (std::size_t i = 0; i < kappas.size(); ++i) {
      double m = 1.0;
      for (const auto& r : *reps) m = std::min(m, r.sweep[i].coverage);
      s.x.push_back(kappas[i]);
      s.y.push_back(m);
    }
    cov.series.push_back(std::move(s));
  }
  cov.series.push_back({"1 - epsilon", {kappas.front(), kappas.back()}, {1.0 - params.epsilon, 1.0 - params.epsilon}, true});
  res.plots.push_back(std::move(cov));
  res.plots.push_back({"lieb_tradeoff.svg", "Largest passing kappa", "epsilon", "kappa*", false, true, {s_sup, s_lp}});
  return res;
}

// ---------------------------------------------------------------- Keller

SuiteResult run_keller_suite(const KellerParams& params) {
  require(!params.spaces.empty(), ErrorKind::domain, "Keller suite needs at least one space");
  SuiteResult res;
  res.kind = "keller";
  struct Sample {
    std::size_t space;
    std::size_t record;
    KellerValues values;
    bool zero_energy;
  };
  std::vector<Sample> samples;
  std::vector<GraphSpace> spaces;
  for (const auto& s : params.spaces) {
    require(s.kind == "lattice" && s.dim == 2, ErrorKind::domain, "Keller suite generates 2D sub-rectangles");
    spaces.push_back(build_space(s));
  }
  for (std::size_t si = 0; si < spaces.size(); ++si) {
    const auto& space = spaces[si];
    const int extent = params.spaces[si].extent;
    for (std::size_t g = 0; g < params.geometries; ++g) {
      Draw draw(params.seed, stream_id(si, g));
      auto box = draw_subbox(draw, 2, extent, params.side_min, params.side_max);
      auto omega = DomainMask::from_vertices(space, subbox_vertices(2, extent, box));
      const Vertex wc = omega.vertices()[draw.index(omega.size())];
      const double wr = draw.uniform(0.0, params.well_radius_max);
      const double shift_depth = draw.uniform(params.depths.front(), params.depths.back());
      const int mode = draw.integer(0, params.max_mode);
      auto well = well_vertices(space, omega, wc, wr);
      Json geom = {{"space", params.spaces[si].label()}, {"omega", subbox_json(2, box)},
                   {"well_center", wc},                  {"well_radius", wr}, {"p", params.p}};

      auto add = [&](const std::string& tag, Json inputs, bool zero, auto&& make_potential) {
        auto rec = evaluate(tag, inputs, [&](InstanceRecord& rec) {
          auto V = make_potential();
          auto k = keller_bounds(space, omega, V, params.p);
          rec.lhs = k.product;
          rec.rhs = k.lambda;
          rec.details = {{"lambda", k.lambda},   {"norm_p", k.norm_p}, {"measure", k.measure},
                         {"product", k.product}, {"eta", k.eta},       {"moment_ratio", k.moment_ratio}};
          rec.pass = true;
          samples.push_back({si, res.instances.size(), k, zero});
        });
        res.instances.push_back(std::move(rec));
      };

      // Zero-energy instances: the well at its critical depth, and a shifted
      // eigenpair V = W - lambda_k.
      Json crit = geom;
      crit["construction"] = "critical-depth";
      add("keller-zero", crit, true, [&] {
        return well_potential(space.size(), well, -critical_well_depth(space, omega, well));
      });
      Json shift = geom;
      shift["construction"] = "eigen-shift";
      shift["depth"] = shift_depth;
      shift["mode"] = mode;
      add("keller-zero", shift, true, [&] {
        auto W = well_potential(space.size(), well, -shift_depth);
        auto spec = assemble_generator(space, omega, &W);
        const auto k = static_cast<std::size_t>(std::min<int>(mode, static_cast<int>(spec.size()) - 1));
        return W.shifted(-spec.eigenvalue(k));
      });
      for (double d : params.depths) {
        Json sweep = geom;
        sweep["depth"] = d;
        add("keller-sweep", sweep, false, [&] { return well_potential(space.size(), well, -d); });
      }
      Json pos = geom;
      pos["depth"] = -params.depths.back();
      add("keller-positive", pos, false, [&] { return well_potential(space.size(), well, params.depths.back()); });
    }
  }

  double c_hat = kInf;
  for (const auto& s : samples) {
    if (s.zero_energy) c_hat = std::min(c_hat, s.values.product);
  }
  std::vector<double> cp(spaces.size(), 0.0);
  std::size_t below_fail = 0, positive_fail = 0;
  Series neg{"lambda <= 0", {}, {}, false}, posv{"lambda > 0", {}, {}, false};
  for (const auto& s : samples) {
    auto& rec = res.instances[s.record];
    rec.constants["c"] = c_hat;
    const auto& k = s.values;
    if (k.lambda <= 0.0) cp[s.space] = std::max(cp[s.space], k.moment_ratio);
    if (rec.tag == "keller-sweep" && k.product < c_hat && k.lambda <= 0.0) {
      rec.pass = false;
      ++below_fail;
    }
    if (rec.tag == "keller-positive" && !(k.lambda > 0.0)) {
      rec.pass = false;
      ++positive_fail;
    }
    if (k.product > 0.0) {
      (k.lambda <= 0.0 ? neg : posv).x.push_back(k.product);
      (k.lambda <= 0.0 ? neg : posv).y.push_back(k.lambda);
    }
  }
  double lo = kInf, hi = 0.0;
  Json cps = Json::object();
  for (std::size_t si = 0; si < spaces.size(); ++si) {
    cps[params.spaces[si].label()] = cp[si];
    lo = std::min(lo, cp[si]);
    hi = std::max(hi, cp[si]);
  }
  for (auto& rec : res.instances) rec.constants["c_p"] = cps;
  res.checks.push_back(count_check("no_nonpositive_eigenvalue_below_c", below_fail));
  res.checks.push_back(count_check("nonnegative_potential_positive_eigenvalue", positive_fail));
  res.checks.push_back(band_check("c_p_stability", lo, hi, params.band));
  res.summary = {{"c", c_hat}, {"c_p", cps}, {"p", params.p}};
  res.plots.push_back({"keller.svg", "Principal eigenvalue against mu(Omega)^(beta/alpha-1/p) ||V-||_p",
                       "mu(Omega)^(beta/alpha-1/p) ||V-||_p", "lambda", true, false, {neg, posv}});
  return res;
}

// ---------------------------------------------------------------- wavelength

SuiteResult run_wavelength_suite(const WavelengthParams& params) {
  require(params.space.kind == "lattice" && params.space.dim == 2, ErrorKind::domain,
          "wavelength suite generates 2D domains");
  SuiteResult res;
  res.kind = "wavelength";
  auto space = build_space(params.space);
  const auto& sc = space.scaling();
  struct Pair {
    std::size_t domain;
    std::size_t record;
    double lambda;
    double needed;
    std::vector<double> u;
    DomainMask omega;
  };
  std::vector<Pair> pairs;
  for (std::size_t d = 0; d < params.domains; ++d) {
    Draw draw(params.seed, stream_id(0, d));
    auto box = draw_subbox(draw, 2, params.space.extent, params.side_min, params.side_max);
    const bool l_shape = draw.uniform(0.0, 1.0) < 0.5;
    auto omega = DomainMask::from_vertices(space, subbox_vertices(2, params.space.extent, box, l_shape));
    auto spec = assemble_generator(space, omega);
    for (std::size_t k = 0; k < params.eigenpairs && k < spec.size(); ++k) {
      Json inputs = {{"space", params.space.label()}, {"omega", subbox_json(2, box)},
                     {"shape", l_shape ? "L" : "rectangle"}, {"mode", k}};
      auto rec = evaluate("wavelength", inputs, [&](InstanceRecord& rec) {
        auto u = spec.mode_function(k);
        const double lambda = spec.eigenvalue(k);
        require(lambda > 0.0, ErrorKind::instance, "eigenvalue must be positive");
        const double rho = same_sign_radius(space, u);
        const double needed = sc.F(rho) * lambda;
        rec.details = {{"lambda", lambda}, {"same_sign_radius", rho}, {"needed", needed}};
        rec.pass = true;
        pairs.push_back({d, res.instances.size(), lambda, needed, std::move(u), omega});
      });
      res.instances.push_back(std::move(rec));
    }
  }
  double c_fit = 0.0;
  for (const auto& p : pairs) c_fit = std::max(c_fit, p.needed);
  c_fit *= 1.0 + 1e-9;
  std::vector<double> per_domain(params.domains, 0.0);
  std::size_t violations = 0;
  Series s{"eigenpairs", {}, {}, false};
  for (const auto& p : pairs) {
    auto& rec = res.instances[p.record];
    const double radius = sc.R(c_fit / p.lambda);
    auto bad = wavelength_violations(space, p.omega, p.u, radius);
    rec.lhs = p.needed;
    rec.rhs = c_fit;
    rec.constants["C_fit"] = c_fit;
    rec.details["radius"] = radius;
    rec.details["violations"] = bad.size();
    rec.pass = bad.empty();
    if (!bad.empty()) ++violations;
    per_domain[p.domain] = std::max(per_domain[p.domain], p.needed);
    s.x.push_back(p.lambda);
    s.y.push_back(p.needed);
  }
  double lo = kInf, hi = 0.0;
  for (double c : per_domain) {
    if (c > 0.0) {
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  }
  res.checks.push_back(count_check("every_ball_changes_sign", violations));
  res.checks.push_back(band_check("C_fit_stability", lo, hi, params.band));
  res.summary = {{"C_fit", c_fit}, {"per_domain", per_domain}};
  res.plots.push_back({"wavelength.svg", "Constant needed per eigenpair", "lambda", "F(rho*) lambda", true, false, {s}});
  return res;
}

// ---------------------------------------------------------------- Liouville

SuiteResult run_liouville_suite(const LiouvilleParams& params) {
  SuiteResult res;
  res.kind = "liouville";
  double k2lo = kInf, k2hi = 0.0, k3lo = kInf, k3hi = 0.0, chlo = kInf, chhi = 0.0;
  std::size_t failures = 0;
  PlotSpec plot{"liouville_profile.svg", "Infimum profile M(r)", "r", "M(r)", true, true, {}};
  for (int n : params.extents) {
    Json inputs = {{"dim", params.dim}, {"extent", n}, {"ball_radius", params.ball_radius}, {"p", params.p}};
    auto rec = evaluate("liouville", inputs, [&](InstanceRecord& rec) {
      auto box = build_lattice(params.dim, n, false);
      std::array<int, 3> c{n / 2, n / 2, n / 2};
      const Vertex o = lattice_vertex(n, std::span<const int>(c.data(), static_cast<std::size_t>(params.dim)));
      auto region = box_interior(box);
      auto u = hit_before_exit(box, region, closed_ball(box, o, params.ball_radius));
      std::vector<double> radii;
      for (int r = 2; r <= n / 8; ++r) radii.push_back(r);
      require(!radii.empty(), ErrorKind::geometry, "box too small for radii >= 2");
      auto rows = liouville_profile(box, region, u, o, radii, params.p);
      Json jr = Json::array();
      Series s{"box " + std::to_string(n), {}, {}, true};
      bool monotone = true;
      double prev = kInf;
      for (const auto& r : rows) {
        jr.push_back({{"r", r.r}, {"M", r.M}, {"M2r", r.M2}, {"kappa2", r.kappa2}, {"kappa3", r.kappa3},
                      {"chain", r.chain}});
        k2lo = std::min(k2lo, r.kappa2);
        k2hi = std::max(k2hi, r.kappa2);
        k3lo = std::min(k3lo, r.kappa3);
        k3hi = std::max(k3hi, r.kappa3);
        chlo = std::min(chlo, r.chain);
        chhi = std::max(chhi, r.chain);
        monotone = monotone && r.M <= prev && r.M2 <= r.M;
        prev = r.M;
        s.x.push_back(r.r);
        s.y.push_back(r.M);
      }
      rec.details = {{"rows", jr}, {"superharmonic", true}};
      rec.lhs = rows.front().M;
      rec.rhs = rows.back().M;
      rec.pass = monotone;
      plot.series.push_back(std::move(s));
    });
    if (!rec.pass) ++failures;
    res.instances.push_back(std::move(rec));
  }
  if (params.potential_extent > 0) {
    const int n = params.potential_extent;
    Json inputs = {{"dim", params.dim},
                   {"extent", n},
                   {"kappa", params.potential_kappa},
                   {"radii", params.potential_radii},
                   {"stride", params.potential_stride},
                   {"potential", "constant-1"}};
    auto rec = evaluate("liouville-potential", inputs, [&](InstanceRecord& rec) {
      auto box = build_lattice(params.dim, n, false);
      std::array<int, 3> c{n / 2, n / 2, n / 2};
      const Vertex o = lattice_vertex(n, std::span<const int>(c.data(), static_cast<std::size_t>(params.dim)));
      auto rows = liouville_potential_profile(box, PotentialField::constant(box.size(), 1.0), o,
                                              params.potential_kappa, params.potential_radii,
                                              params.potential_stride);
      Json jr = Json::array();
      double m = kInf;
      for (const auto& r : rows) {
        jr.push_back({{"r", r.r}, {"psi_inf", r.psi_inf}, {"phi_kappa", r.phi_kappa}, {"ratio", r.ratio},
                      {"annulus_points", r.annulus_points}});
        m = std::min(m, r.ratio);
      }
      rec.details = {{"rows", jr}};
      rec.lhs = m;
      rec.rhs = 0.0;
      rec.constants["profile_constant"] = m;
      rec.pass = m > 0.0 && std::isfinite(m);
    });
    if (!rec.pass) ++failures;
    res.instances.push_back(std::move(rec));
  }
  res.checks.push_back(count_check("profiles", failures));
  res.checks.push_back(band_check("kappa2_band", k2lo, k2hi, params.band));
  res.checks.push_back(band_check("kappa3_band", k3lo, k3hi, params.band));
  res.summary = {{"kappa2", {k2lo, k2hi}}, {"kappa3", {k3lo, k3hi}}, {"chain", {chlo, chhi}}};
  res.plots.push_back(std::move(plot));
  return res;
}

SuiteResult run_recurrent_suite(const RecurrentParams& params) {
  SuiteResult res;
  res.kind = "recurrent";
  PlotSpec plot{"recurrent.svg", "Probability of reaching the centre ball", "box extent", "probability",
                true, false, {}};
  auto one = [&](int dim, const std::vector<int>& extents, const char* role) {
    RecurrentReport rep;
    Json inputs = {{"dim", dim},
                   {"extents", extents},
                   {"ball_radius", params.ball_radius},
                   {"distance", params.distance},
                   {"boundary", params.boundary == OuterBoundary::absorbing ? "absorbing" : "reflecting"},
                   {"role", role}};
    auto rec = evaluate("recurrent", inputs, [&](InstanceRecord& rec) {
      rep = recurrent_liouville_check(dim, extents, params.ball_radius, params.distance, params.boundary);
      Json rows = Json::array();
      Series s{std::string(role) + " " + std::to_string(dim) + "D", {}, {}, true};
      for (const auto& r : rep.rows) {
        rows.push_back({{"extent", r.extent}, {"probability", r.probability}});
        s.x.push_back(r.extent);
        s.y.push_back(r.probability);
      }
      plot.series.push_back(std::move(s));
      rec.details = {{"rows", rows}, {"increasing", rep.increasing}};
      rec.lhs = rep.final_probability;
      rec.rhs = std::string(role) == "recurrent" ? params.final_min : params.control_max;
      rec.pass = std::string(role) == "recurrent" ? rep.increasing && rep.final_probability >= params.final_min
                                                  : rep.final_probability <= params.control_max;
    });
    res.instances.push_back(std::move(rec));
    return rep;
  };
  auto main_rep = one(params.dim, params.extents, "recurrent");
  auto ctrl = one(params.control_dim, params.control_extents, "control");
  res.checks.push_back({"increasing", main_rep.increasing, 0.0, 0.0, "strictly increasing in the box extent"});
  res.checks.push_back({"final_probability", main_rep.final_probability >= params.final_min,
                        main_rep.final_probability, params.final_min, "at the largest box"});
  res.checks.push_back({"control_plateau", ctrl.final_probability <= params.control_max, ctrl.final_probability,
                        params.control_max, "transient control at the largest box"});
  res.summary = {{"final_probability", main_rep.final_probability}, {"control_final", ctrl.final_probability}};
  res.plots.push_back(std::move(plot));
  return res;
}

// ---------------------------------------------------------------- local Faber-Krahn

SuiteResult run_fk_suite(const FkParams& params) {
  require(!params.spaces.empty(), ErrorKind::domain, "local Faber-Krahn suite needs at least one space");
  SuiteResult res;
  res.kind = "fk-local";
  std::vector<double> c(params.spaces.size(), kInf);
  std::vector<std::vector<std::size_t>> owners(params.spaces.size());
  std::size_t median_fail = 0;
  PlotSpec plot{"fk_local.svg", "Largest ball norm per instance", "instance", "max ||V-||_{p,1}", false, true, {}};
  for (std::size_t si = 0; si < params.spaces.size(); ++si) {
    const auto& spec_s = params.spaces[si];
    require(spec_s.kind == "lattice" && !spec_s.periodic, ErrorKind::domain,
            "local Faber-Krahn suite generates sub-boxes of a lattice box");
    auto space = build_space(spec_s);
    const int dim = spec_s.dim;
    Series s{spec_s.label(), {}, {}, false};
    for (std::size_t i = 0; i < params.instances; ++i) {
      Draw draw(params.seed, stream_id(si, i));
      auto box = draw_subbox(draw, dim, spec_s.extent, params.side_min, params.side_max);
      auto omega = DomainMask::from_vertices(space, subbox_vertices(dim, spec_s.extent, box));
      const Vertex wc = omega.vertices()[draw.index(omega.size())];
      const double wr = draw.uniform(params.well_radius_min, params.well_radius_max);
      const double depth = draw.uniform(params.depth_min, params.depth_max);
      Json inputs = {{"space", spec_s.label()}, {"omega", subbox_json(dim, box)}, {"well_center", wc},
                     {"well_radius", wr},       {"depth", depth}};
      auto rec = evaluate("fk-local", inputs, [&](InstanceRecord& rec) {
        auto W = well_potential(space.size(), well_vertices(space, omega, wc, wr), -depth);
        auto pe = principal_eigenvalue(space, omega, &W);
        auto V = W.shifted(-pe.lambda0);
        const double residual = relative_residual(space, omega, &V, pe.phi1, 0.0);
        auto rep = local_fk_certificate(space, omega, V, pe.phi1);
        const auto& m = rep.median;
        const bool median_ok = m.prob_at_time >= 0.5 && m.prob_at_time < 0.5 + m.quantum && m.prob_at_lower < 0.5;
        if (!median_ok) ++median_fail;
        rec.lhs = rep.max_norm;
        rec.details = {{"o", rep.o},
                       {"u_ratio", rep.u_ratio},
                       {"median_exit", m.time},
                       {"prob_at_median", m.prob_at_time},
                       {"prob_below_median", m.prob_at_lower},
                       {"quantum", m.quantum},
                       {"radius", rep.radius},
                       {"p", rep.p},
                       {"best_center", rep.best_center},
                       {"lambda", pe.lambda0},
                       {"residual", residual}};
        rec.pass = median_ok && residual <= 1e-8 && rep.u_ratio >= 0.75;
        c[si] = std::min(c[si], rep.max_norm);
        owners[si].push_back(res.instances.size());
        s.x.push_back(static_cast<double>(i));
        s.y.push_back(rep.max_norm);
      });
      res.instances.push_back(std::move(rec));
    }
    plot.series.push_back(std::move(s));
  }
  double lo = kInf, hi = 0.0;
  Json cs = Json::object();
  std::size_t below = 0;
  for (std::size_t si = 0; si < params.spaces.size(); ++si) {
    if (!std::isfinite(c[si])) continue;
    cs[params.spaces[si].label()] = c[si];
    lo = std::min(lo, c[si]);
    hi = std::max(hi, c[si]);
    for (std::size_t k : owners[si]) {
      auto& rec = res.instances[k];
      rec.rhs = c[si];
      rec.constants["c"] = c[si];
      if (rec.lhs < c[si]) {
        rec.pass = false;
        ++below;
      }
    }
  }
  res.checks.push_back(count_check("ball_norm>=c", below));
  res.checks.push_back(count_check("median_exit_definition", median_fail));
  res.checks.push_back(band_check("c_stability", lo, hi, params.band));
  res.summary = {{"c", cs}};
  res.plots.push_back(std::move(plot));
  return res;
}

}  // namespace dlab
