#include "dlab/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dlab/error.hpp"
#include "dlab/plot.hpp"
#include "dlab/serialize.hpp"

namespace dlab {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kSuites{"hitting", "lieb", "keller", "liouville", "fk-local", "wavelength", "recurrent"};

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the first occurrence of "key" used as an object key; 1 when absent.
std::size_t line_of_key(const std::string& text, const std::string& key) {
  const std::string quoted = "\"" + key + "\"";
  std::size_t pos = 0;
  while ((pos = text.find(quoted, pos)) != std::string::npos) {
    std::size_t after = pos + quoted.size();
    while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
    if (after < text.size() && text[after] == ':') return line_of_offset(text, pos);
    pos = after;
  }
  return 1;
}

[[noreturn]] void config_error(std::size_t line, const std::string& what) {
  fail(ErrorKind::parse, "config line " + std::to_string(line) + ": " + what);
}

// Typed access to one config object with unknown-key detection.
class Reader {
 public:
  Reader(const Json& j, const std::string& text) : j_(j), text_(text) {}

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }
  std::size_t line(const std::string& key) const { return line_of_key(text_, key); }

  template <class T>
  void number(const std::string& key, T& out, double lo, double hi) {
    if (!has(key)) return;
    const Json& v = j_[key];
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) config_error(line(key), "'" + key + "' must be an integer");
    } else {
      if (!v.is_number()) config_error(line(key), "'" + key + "' must be a number");
    }
    const double d = v.get<double>();
    if (!(d >= lo && d <= hi)) {
      config_error(line(key), "'" + key + "' = " + format_number(d) + " outside [" + format_number(lo) + ", " +
                                  format_number(hi) + "]");
    }
    out = v.get<T>();
  }

  template <class T>
  void numbers(const std::string& key, std::vector<T>& out, double lo, double hi) {
    if (!has(key)) return;
    const Json& v = j_[key];
    if (!v.is_array() || v.empty()) config_error(line(key), "'" + key + "' must be a nonempty array");
    std::vector<T> tmp;
    for (const auto& e : v) {
      const bool ok = std::is_integral_v<T> ? e.is_number_integer() : e.is_number();
      if (!ok) config_error(line(key), "'" + key + "' entries must be " + (std::is_integral_v<T> ? "integers" : "numbers"));
      const double d = e.get<double>();
      if (!(d >= lo && d <= hi)) config_error(line(key), "'" + key + "' entry " + format_number(d) + " out of range");
      tmp.push_back(e.get<T>());
    }
    out = std::move(tmp);
  }

  void seed(std::uint64_t& out, bool required) {
    if (!has("seed")) {
      if (required) config_error(1, "'seed' is required");
      return;
    }
    if (!j_["seed"].is_number_unsigned()) config_error(line("seed"), "'seed' must be a nonnegative integer");
    out = j_["seed"].get<std::uint64_t>();
  }

  SpaceSpec space(const std::string& key) {
    if (!has(key)) config_error(1, "'" + key + "' is required");
    return checked_space(j_[key], key);
  }

  std::vector<SpaceSpec> spaces(const std::string& key) {
    if (!has(key)) config_error(1, "'" + key + "' is required");
    if (!j_[key].is_array() || j_[key].empty()) config_error(line(key), "'" + key + "' must be a nonempty array");
    std::vector<SpaceSpec> out;
    for (const auto& s : j_[key]) out.push_back(checked_space(s, key));
    return out;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    if (!j_[key].is_string()) config_error(line(key), "'" + key + "' must be a string");
    return j_[key].get<std::string>();
  }

  const Json& raw(const std::string& key) {
    used_.insert(key);
    return j_[key];
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) config_error(line(key), "unknown key '" + key + "'");
    }
  }

 private:
  SpaceSpec checked_space(const Json& j, const std::string& key) {
    try {
      auto s = space_spec_from_json(j);
      (void)build_space(s);  // construction guards
      return s;
    } catch (const Error& e) {
      config_error(line(key), e.what());
    }
  }

  const Json& j_;
  const std::string& text_;
  std::set<std::string> used_;
};

void require_order(Reader& r, const std::string& lo_key, double lo, double hi) {
  if (lo > hi) config_error(r.line(lo_key), "'" + lo_key + "' exceeds its upper counterpart");
}

void require_2d_lattice(Reader& r, const std::string& key, const SpaceSpec& s, int min_extent) {
  if (s.kind != "lattice" || s.dim != 2 || s.periodic) config_error(r.line(key), "'" + key + "' must be a 2D lattice box");
  if (s.extent < min_extent) config_error(r.line(key), "'" + key + "' extent must be at least " + std::to_string(min_extent));
}

template <class T>
T parse_params(const std::string& kind, Reader& r);

template <>
HittingParams parse_params(const std::string&, Reader& r) {
  HittingParams p;
  p.spaces = r.spaces("spaces");
  r.seed(p.seed, true);
  r.number("instances", p.instances, 0, 1e6);
  r.number("eta", p.eta, 1e-6, 1.0);
  r.number("r_min", p.r_min, 1.0, 1e6);
  r.number("r_max", p.r_max, 1.0, 1e6);
  r.number("target_radius_max", p.target_radius_max, 0.5, 1e6);
  require_order(r, "r_min", p.r_min, p.r_max);
  if (r.has("explicit")) {
    const Json& list = r.raw("explicit");
    const auto line = r.line("explicit");
    if (!list.is_array()) config_error(line, "'explicit' must be an array");
    for (const auto& e : list) {
      if (!e.is_object()) config_error(line, "explicit instances are objects {space, o, K, r}");
      ExplicitHittingInstance x;
      try {
        x.space = e.value("space", std::size_t{0});
        x.o = e.at("o").get<Vertex>();
        x.K = e.at("K").get<std::vector<Vertex>>();
        x.r = e.at("r").get<double>();
      } catch (const Json::exception& ex) {
        config_error(line, std::string("explicit instance: ") + ex.what());
      }
      if (x.space >= p.spaces.size()) config_error(line, "explicit instance refers to a missing space");
      const auto n = build_space(p.spaces[x.space]).size();
      if (x.o >= n) config_error(line, "explicit instance start vertex out of range");
      for (Vertex v : x.K) {
        if (v >= n) config_error(line, "explicit instance target vertex out of range");
      }
      if (x.K.empty()) config_error(line, "explicit instance needs a nonempty target");
      p.explicit_instances.push_back(std::move(x));
    }
  }
  if (p.instances == 0 && p.explicit_instances.empty()) config_error(r.line("instances"), "no instances to run");
  return p;
}

template <>
LiebParams parse_params(const std::string&, Reader& r) {
  LiebParams p;
  p.space = r.space("space");
  require_2d_lattice(r, "space", p.space, 6);
  r.seed(p.seed, true);
  r.number("instances", p.instances, 1, 1e5);
  r.number("side_min", p.side_min, 2, 1e4);
  r.number("side_max", p.side_max, 2, 1e4);
  require_order(r, "side_min", p.side_min, p.side_max);
  if (p.side_min > p.space.extent - 2) config_error(r.line("side_min"), "'side_min' does not fit in the space");
  r.number("well_radius_min", p.well_radius_min, 0, 1e4);
  r.number("well_radius_max", p.well_radius_max, 0, 1e4);
  require_order(r, "well_radius_min", p.well_radius_min, p.well_radius_max);
  r.number("depth_min", p.depth_min, 1e-12, 1e6);
  r.number("depth_max", p.depth_max, 1e-12, 1e6);
  require_order(r, "depth_min", p.depth_min, p.depth_max);
  r.number("max_mode", p.max_mode, 0, 100);
  r.number("epsilon", p.epsilon, 1e-12, 1.0);
  r.numbers("epsilons", p.epsilons, 1e-12, 1.0);
  r.numbers("kappas", p.kappas, 1e-300, 1e300);
  std::sort(p.kappas.begin(), p.kappas.end());
  r.number("eta", p.eta, 1e-6, 1.0);
  r.number("p", p.p, 1.0, 1e6);
  return p;
}

template <>
KellerParams parse_params(const std::string&, Reader& r) {
  KellerParams p;
  p.spaces = r.spaces("spaces");
  int min_extent = 1 << 30;
  for (const auto& s : p.spaces) {
    require_2d_lattice(r, "spaces", s, 6);
    min_extent = std::min(min_extent, s.extent);
  }
  r.seed(p.seed, true);
  r.number("geometries", p.geometries, 1, 1e5);
  r.number("p", p.p, 1.0, 1e6);
  if (p.p <= 1.0) config_error(r.line("p"), "'p' must exceed max(alpha/beta, 1)");
  r.number("side_min", p.side_min, 2, 1e4);
  r.number("side_max", p.side_max, 2, 1e4);
  require_order(r, "side_min", p.side_min, p.side_max);
  if (p.side_min > min_extent - 2) config_error(r.line("side_min"), "'side_min' does not fit in every space");
  r.number("well_radius_max", p.well_radius_max, 0, 1e4);
  r.numbers("depths", p.depths, 1e-12, 1e6);
  std::sort(p.depths.begin(), p.depths.end());
  r.number("max_mode", p.max_mode, 0, 100);
  r.number("band", p.band, 1.0, 1e300);
  return p;
}

template <>
WavelengthParams parse_params(const std::string&, Reader& r) {
  WavelengthParams p;
  p.space = r.space("space");
  require_2d_lattice(r, "space", p.space, 6);
  r.seed(p.seed, true);
  r.number("domains", p.domains, 1, 1e4);
  r.number("eigenpairs", p.eigenpairs, 1, 1e4);
  r.number("side_min", p.side_min, 2, 1e4);
  r.number("side_max", p.side_max, 2, 1e4);
  require_order(r, "side_min", p.side_min, p.side_max);
  if (p.side_min > p.space.extent - 2) config_error(r.line("side_min"), "'side_min' does not fit in the space");
  r.number("band", p.band, 1.0, 1e300);
  return p;
}

template <>
LiouvilleParams parse_params(const std::string&, Reader& r) {
  LiouvilleParams p;
  std::uint64_t unused = 0;
  r.seed(unused, false);
  r.number("dim", p.dim, 1, 3);
  r.numbers("extents", p.extents, 16, 1e5);
  r.number("ball_radius", p.ball_radius, 0, 1e4);
  r.number("p", p.p, 1.0, 1e6);
  r.number("band", p.band, 1.0, 1e300);
  r.number("potential_extent", p.potential_extent, 0, 1e5);
  r.number("potential_kappa", p.potential_kappa, 1e-6, 1e6);
  r.numbers("potential_radii", p.potential_radii, 1.0, 1e5);
  r.number("potential_stride", p.potential_stride, 1, 1e9);
  return p;
}

template <>
RecurrentParams parse_params(const std::string&, Reader& r) {
  RecurrentParams p;
  std::uint64_t unused = 0;
  r.seed(unused, false);
  r.number("dim", p.dim, 1, 3);
  r.numbers("extents", p.extents, 3, 1e5);
  r.number("control_dim", p.control_dim, 1, 3);
  r.numbers("control_extents", p.control_extents, 3, 1e5);
  r.number("ball_radius", p.ball_radius, 0, 1e4);
  r.number("distance", p.distance, 1, 1e5);
  const auto b = r.text("boundary", "absorbing");
  if (b == "absorbing") {
    p.boundary = OuterBoundary::absorbing;
  } else if (b == "reflecting") {
    p.boundary = OuterBoundary::reflecting;
  } else {
    config_error(r.line("boundary"), "'boundary' must be \"absorbing\" or \"reflecting\"");
  }
  r.number("final_min", p.final_min, 0.0, 1.0);
  r.number("control_max", p.control_max, 0.0, 1.0);
  return p;
}

template <>
FkParams parse_params(const std::string&, Reader& r) {
  FkParams p;
  p.spaces = r.spaces("spaces");
  int min_extent = 1 << 30;
  for (const auto& s : p.spaces) {
    if (s.kind != "lattice" || s.periodic) config_error(r.line("spaces"), "'spaces' must be lattice boxes");
    min_extent = std::min(min_extent, s.extent);
  }
  r.seed(p.seed, true);
  r.number("instances", p.instances, 1, 1e5);
  r.number("side_min", p.side_min, 2, 1e4);
  r.number("side_max", p.side_max, 2, 1e4);
  require_order(r, "side_min", p.side_min, p.side_max);
  if (p.side_min > min_extent - 2) config_error(r.line("side_min"), "'side_min' does not fit in every space");
  r.number("well_radius_min", p.well_radius_min, 0, 1e4);
  r.number("well_radius_max", p.well_radius_max, 0, 1e4);
  require_order(r, "well_radius_min", p.well_radius_min, p.well_radius_max);
  r.number("depth_min", p.depth_min, 1e-12, 1e6);
  r.number("depth_max", p.depth_max, 1e-12, 1e6);
  require_order(r, "depth_min", p.depth_min, p.depth_max);
  r.number("band", p.band, 1.0, 1e300);
  return p;
}

template <class T, class Run>
SuiteResult parse_and_run(const SuiteConfig& cfg, const std::string& text, Run run) {
  Reader r(cfg.document, text);
  (void)r.has("suite");
  auto params = parse_params<T>(cfg.kind, r);
  r.finish();
  return run(params);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
  f.close();
  if (!f) fail(ErrorKind::io, "cannot write " + path.string());
}

// An earlier run's directory is recognisable by its report.json.
bool replaceable(const fs::path& dir) {
  if (!fs::exists(dir)) return true;
  if (!fs::is_directory(dir)) return false;
  return fs::is_empty(dir) || fs::exists(dir / "report.json");
}

}  // namespace

SuiteConfig parse_suite_config(const std::string& kind, const std::string& text) {
  SuiteConfig cfg;
  try {
    cfg.document = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::string what = e.what();
    // Drop nlohmann's "[json.exception.parse_error.101] parse error at ..." prefix.
    if (auto pos = what.find(": syntax error"); pos != std::string::npos) what = what.substr(pos + 2);
    config_error(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1), what);
  }
  if (!cfg.document.is_object()) config_error(1, "config must be a JSON object");
  std::string named;
  if (cfg.document.contains("suite")) {
    if (!cfg.document["suite"].is_string()) config_error(line_of_key(text, "suite"), "'suite' must be a string");
    named = cfg.document["suite"].get<std::string>();
  }
  if (!kind.empty() && !named.empty() && kind != named) {
    config_error(line_of_key(text, "suite"), "config is for suite '" + named + "', not '" + kind + "'");
  }
  cfg.kind = kind.empty() ? named : kind;
  if (cfg.kind.empty()) config_error(1, "no suite given");
  if (!kSuites.count(cfg.kind)) config_error(line_of_key(text, "suite"), "unknown suite '" + cfg.kind + "'");

  // Validate the parameters now so that errors surface before any work.
  Reader r(cfg.document, text);
  (void)r.has("suite");
  if (cfg.kind == "hitting") (void)parse_params<HittingParams>(cfg.kind, r);
  if (cfg.kind == "lieb") (void)parse_params<LiebParams>(cfg.kind, r);
  if (cfg.kind == "keller") (void)parse_params<KellerParams>(cfg.kind, r);
  if (cfg.kind == "wavelength") (void)parse_params<WavelengthParams>(cfg.kind, r);
  if (cfg.kind == "liouville") (void)parse_params<LiouvilleParams>(cfg.kind, r);
  if (cfg.kind == "recurrent") (void)parse_params<RecurrentParams>(cfg.kind, r);
  if (cfg.kind == "fk-local") (void)parse_params<FkParams>(cfg.kind, r);
  r.finish();
  cfg.document["suite"] = cfg.kind;
  return cfg;
}

SuiteResult run_suite(const SuiteConfig& cfg) {
  const std::string text = cfg.document.dump();
  if (cfg.kind == "hitting") return parse_and_run<HittingParams>(cfg, text, run_hitting_suite);
  if (cfg.kind == "lieb") return parse_and_run<LiebParams>(cfg, text, run_lieb_suite);
  if (cfg.kind == "keller") return parse_and_run<KellerParams>(cfg, text, run_keller_suite);
  if (cfg.kind == "wavelength") return parse_and_run<WavelengthParams>(cfg, text, run_wavelength_suite);
  if (cfg.kind == "liouville") return parse_and_run<LiouvilleParams>(cfg, text, run_liouville_suite);
  if (cfg.kind == "recurrent") return parse_and_run<RecurrentParams>(cfg, text, run_recurrent_suite);
  if (cfg.kind == "fk-local") return parse_and_run<FkParams>(cfg, text, run_fk_suite);
  fail(ErrorKind::parse, "unknown suite '" + cfg.kind + "'");
}

void write_artifacts(const SuiteResult& result, const std::string& config_digest, const std::string& out_dir) {
  const fs::path target = fs::absolute(fs::path(out_dir)).lexically_normal();
  require(!target.filename().empty(), ErrorKind::io, "output directory needs a name");
  require(replaceable(target), ErrorKind::io,
          "refusing to replace " + target.string() + ": it exists and does not hold an earlier run");
  fs::create_directories(target.parent_path());
  const fs::path tmp = target.parent_path() / ("." + target.filename().string() + ".tmp-" + config_digest);
  std::error_code ec;
  fs::remove_all(tmp, ec);
  try {
    fs::create_directories(tmp / "instances");
    fs::create_directories(tmp / "plots");

    std::map<std::string, int> seen;
    Json index = Json::array();
    std::vector<const InstanceRecord*> order;
    for (const auto& r : result.instances) order.push_back(&r);
    std::stable_sort(order.begin(), order.end(),
                     [](const InstanceRecord* a, const InstanceRecord* b) { return a->digest < b->digest; });
    std::string timings = "digest,tag,seconds\n";
    for (const auto* r : order) {
      const int n = seen[r->digest]++;
      const std::string name = n == 0 ? r->digest : r->digest + "-" + std::to_string(n);
      write_file(tmp / "instances" / (name + ".json"), instance_to_json(result.kind, *r).dump(2) + "\n");
      index.push_back(name);
      timings += r->digest + "," + r->tag + "," + format_number(r->runtime) + "\n";
    }
    write_file(tmp / "summary.csv", summary_csv(result));
    write_file(tmp / "timings.csv", timings);

    Json checks = Json::array();
    for (const auto& c : result.checks) {
      checks.push_back({{"name", c.name},
                        {"verdict", c.pass ? "pass" : "fail"},
                        {"value", format_number(c.value)},
                        {"limit", format_number(c.limit)},
                        {"note", c.note}});
    }
    Json plots = Json::array();
    for (const auto& p : result.plots) {
      bool drawable = false;
      for (const auto& s : p.series) drawable = drawable || !s.x.empty();
      if (!drawable) continue;
      write_file(tmp / "plots" / p.file, render_svg(p));
      plots.push_back(p.file);
    }
    Json report = {{"suite", result.kind},
                   {"config_digest", config_digest},
                   {"verdict", result.pass() ? "pass" : "fail"},
                   {"instances", index},
                   {"failing_digests", result.failing_digests()},
                   {"checks", checks},
                   {"summary", result.summary},
                   {"plots", plots}};
    write_file(tmp / "report.json", report.dump(2) + "\n");

    fs::remove_all(target);
    fs::rename(tmp, target);
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(tmp, ec);
    fail(ErrorKind::io, e.what());
  } catch (...) {
    fs::remove_all(tmp, ec);
    throw;
  }
}

RunOutcome run_verify(const std::string& kind, const std::string& config_text, const std::string& out_dir) {
  RunOutcome out;
  SuiteConfig cfg;
  try {
    cfg = parse_suite_config(kind, config_text);
  } catch (const Error& e) {
    out.exit_code = kExitInvalid;
    out.message = e.what();
    return out;
  }
  SuiteResult result;
  try {
    result = run_suite(cfg);
    write_artifacts(result, fnv1a_hex(cfg.document.dump()), out_dir);
  } catch (const Error& e) {
    out.exit_code = kExitInvalid;
    out.message = std::string(to_string(e.kind())) + ": " + e.what();
    return out;
  }
  out.failing_digests = result.failing_digests();
  for (const auto& c : result.checks) {
    if (!c.pass) out.failing_checks.push_back(c.name);
  }
  if (result.pass()) {
    out.exit_code = kExitPass;
    out.message = result.kind + ": " + std::to_string(result.instances.size()) + " instances, all checks pass";
    return out;
  }
  out.exit_code = kExitFail;
  std::ostringstream m;
  m << result.kind << ": certificate failure";
  for (const auto& d : out.failing_digests) {
    auto r = std::find_if(result.instances.begin(), result.instances.end(),
                          [&](const InstanceRecord& x) { return x.digest == d && !x.pass; });
    m << "\n  instance " << d << (r->error.empty() ? "" : " (" + r->error + ")");
  }
  for (const auto& c : out.failing_checks) m << "\n  check " << c;
  out.message = m.str();
  return out;
}

}  // namespace dlab
