#include "dlab/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dlab/error.hpp"

namespace dlab {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double to_double(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  fail(ErrorKind::parse, "bad number '" + s + "' in '" + context + "'");
}

Vertex to_vertex(const GraphSpace& space, const std::string& s, const std::string& context) {
  const double v = to_double(s, context);
  require(v >= 0.0 && v == std::floor(v) && v < static_cast<double>(space.size()), ErrorKind::domain,
          "vertex '" + s + "' out of range in '" + context + "'");
  return static_cast<Vertex>(v);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

Json number_json(double v) { return std::isfinite(v) ? Json(v) : Json(format_number(v)); }

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json space_to_json(const GraphSpace& space) {
  const auto& s = space.scaling();
  Json edges = Json::array();
  for (const auto& e : space.edges()) edges.push_back({e.i, e.j, e.conductance, e.length});
  Json coords = Json::array();
  for (const auto& p : space.coordinates()) coords.push_back({p[0], p[1], p[2]});
  return {{"name", space.name()},
          {"vertices", space.size()},
          {"scaling", {{"alpha1", s.alpha1}, {"alpha2", s.alpha2}, {"beta", s.beta}}},
          {"measure", space.measures()},
          {"coordinates", coords},
          {"edges", edges}};
}

std::string eigenvalues_csv(const GeneratorSpectrum& spec, std::size_t k) {
  if (k == 0 || k > spec.size()) k = spec.size();
  std::string out = "index,eigenvalue\n";
  for (std::size_t n = 0; n < k; ++n) out += std::to_string(n) + "," + format_number(spec.eigenvalue(n)) + "\n";
  return out;
}

std::string modes_csv(const GeneratorSpectrum& spec, std::size_t k) {
  if (k == 0 || k > spec.size()) k = spec.size();
  std::string out = "vertex";
  for (std::size_t n = 0; n < k; ++n) out += ",phi_" + std::to_string(n);
  out += "\n";
  const auto vs = spec.domain().vertices();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    out += std::to_string(vs[i]);
    for (std::size_t n = 0; n < k; ++n) {
      out += "," + format_number(spec.modes()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n)));
    }
    out += "\n";
  }
  return out;
}

Json spectrum_to_json(const GeneratorSpectrum& spec, std::size_t k) {
  if (k == 0 || k > spec.size()) k = spec.size();
  Json vals = Json::array(), modes = Json::array();
  for (std::size_t n = 0; n < k; ++n) {
    vals.push_back(spec.eigenvalue(n));
    Json col = Json::array();
    for (Eigen::Index i = 0; i < spec.modes().rows(); ++i) col.push_back(spec.modes()(i, static_cast<Eigen::Index>(n)));
    modes.push_back(col);
  }
  const auto vs = spec.domain().vertices();
  return {{"domain", std::vector<Vertex>(vs.begin(), vs.end())}, {"eigenvalues", vals}, {"modes", modes}};
}

DomainMask parse_domain(const GraphSpace& space, const std::string& text) {
  if (text == "whole") return DomainMask::whole(space);
  const auto parts = split(text, ':');
  require(!parts.empty(), ErrorKind::parse, "empty domain spec");
  const auto& kind = parts[0];
  if (kind == "ball" || kind == "cball") {
    require(parts.size() == 3, ErrorKind::parse, "domain spec is " + kind + ":<center>:<radius>");
    const Vertex c = to_vertex(space, parts[1], text);
    const double r = to_double(parts[2], text);
    if (kind == "ball") return DomainMask::ball(space, c, r);
    std::vector<Vertex> vs;
    const auto d = space.distances_from(c, r);
    for (Vertex y = 0; y < space.size(); ++y) {
      if (d[y] <= r) vs.push_back(y);
    }
    return DomainMask::from_vertices(space, std::move(vs));
  }
  if (kind == "range") {
    require(parts.size() == 3, ErrorKind::parse, "domain spec is range:<first>:<last>");
    const Vertex a = to_vertex(space, parts[1], text), b = to_vertex(space, parts[2], text);
    require(a <= b, ErrorKind::parse, "empty range in '" + text + "'");
    std::vector<Vertex> vs;
    for (Vertex v = a; v <= b; ++v) vs.push_back(v);
    return DomainMask::from_vertices(space, std::move(vs));
  }
  if (kind == "vertices") {
    require(parts.size() == 2, ErrorKind::parse, "domain spec is vertices:<a>,<b>,...");
    std::vector<Vertex> vs;
    for (const auto& s : split(parts[1], ',')) vs.push_back(to_vertex(space, s, text));
    return DomainMask::from_vertices(space, std::move(vs));
  }
  fail(ErrorKind::parse, "unknown domain spec '" + text + "'");
}

PotentialField parse_potential(const GraphSpace& space, const std::string& text) {
  const std::size_t n = space.size();
  if (text == "zero") return PotentialField::zero(n);
  const auto parts = split(text, ':');
  require(!parts.empty(), ErrorKind::parse, "empty potential spec");
  if (parts[0] == "const") {
    require(parts.size() == 2, ErrorKind::parse, "potential spec is const:<value>");
    return PotentialField::constant(n, to_double(parts[1], text));
  }
  if (parts[0] == "well") {
    require(parts.size() == 4, ErrorKind::parse, "potential spec is well:<center>:<radius>:<depth>");
    const Vertex c = to_vertex(space, parts[1], text);
    const double r = to_double(parts[2], text), depth = to_double(parts[3], text);
    const auto d = space.distances_from(c, r);
    std::vector<double> v(n, 0.0);
    for (Vertex y = 0; y < n; ++y) {
      if (d[y] <= r) v[y] = -depth;
    }
    return PotentialField(std::move(v));
  }
  if (parts[0] == "values") {
    require(parts.size() == 2, ErrorKind::parse, "potential spec is values:<v0>,<v1>,...");
    std::vector<double> v;
    for (const auto& s : split(parts[1], ',')) v.push_back(to_double(s, "potential values"));
    require(v.size() == n, ErrorKind::domain, "potential needs one value per vertex");
    return PotentialField(std::move(v));
  }
  fail(ErrorKind::parse, "unknown potential spec '" + text + "'");
}

Json instance_to_json(const std::string& suite, const InstanceRecord& rec) {
  Json j = {{"suite", suite},
            {"tag", rec.tag},
            {"digest", rec.digest},
            {"inputs", rec.inputs},
            {"lhs", number_json(rec.lhs)},
            {"rhs", number_json(rec.rhs)},
            {"constants", rec.constants},
            {"details", rec.details},
            {"verdict", rec.pass ? "pass" : "fail"}};
  if (!rec.error.empty()) j["error"] = rec.error;
  return j;
}

std::string summary_csv(const SuiteResult& result) {
  std::vector<const InstanceRecord*> order;
  for (const auto& r : result.instances) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(),
                   [](const InstanceRecord* a, const InstanceRecord* b) { return a->digest < b->digest; });
  std::string out = "record,suite,id,tag,verdict,lhs,rhs,note\n";
  for (const auto* r : order) {
    out += "instance," + result.kind + "," + r->digest + "," + csv_field(r->tag) + "," + (r->pass ? "pass" : "fail") +
           "," + format_number(r->lhs) + "," + format_number(r->rhs) + "," + csv_field(r->error) + "\n";
  }
  for (const auto& c : result.checks) {
    out += "check," + result.kind + "," + csv_field(c.name) + ",," + (c.pass ? "pass" : "fail") + "," +
           format_number(c.value) + "," + format_number(c.limit) + "," + csv_field(c.note) + "\n";
  }
  return out;
}

}  // namespace dlab
