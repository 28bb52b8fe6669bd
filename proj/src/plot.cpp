#include "dlab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dlab/error.hpp"

namespace dlab {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 460.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 190.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  bool log = false;
  double lo = 0.0;  // in transformed units
  double hi = 1.0;
  std::vector<double> ticks;  // transformed units

  double transform(double v) const { return log ? std::log10(v) : v; }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
  std::string label(double t) const { return log ? fmt("%g", std::pow(10.0, t)) : fmt("%.4g", t); }
};

Axis make_axis(bool log, double lo, double hi) {
  Axis a;
  a.log = log;
  if (log) {
    lo = std::floor(lo);
    hi = std::ceil(hi);
    if (hi <= lo) hi = lo + 1.0;
    const double step = std::max(1.0, std::ceil((hi - lo) / 8.0));
    for (double t = lo; t <= hi + 1e-9; t += step) a.ticks.push_back(t);
  } else {
    if (hi <= lo) {
      const double pad = lo == 0.0 ? 1.0 : 0.5 * std::abs(lo);
      lo -= pad;
      hi += pad;
    }
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    }
    lo = std::floor(lo / step) * step;
    hi = std::ceil(hi / step) * step;
    for (double t = lo; t <= hi + 1e-9 * step; t += step) a.ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

}  // namespace

std::string render_svg(const PlotSpec& plot) {
  Axis xa, ya;
  xa.log = plot.logx;
  ya.log = plot.logy;
  double xlo = kInf, xhi = -kInf, ylo = kInf, yhi = -kInf;
  std::size_t points = 0;
  for (const auto& s : plot.series) {
    require(s.x.size() == s.y.size(), ErrorKind::domain, "series '" + s.label + "' has unequal x and y lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!xa.usable(s.x[i]) || !ya.usable(s.y[i])) continue;
      const double x = xa.transform(s.x[i]), y = ya.transform(s.y[i]);
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
      ++points;
    }
  }
  require(points > 0, ErrorKind::domain, "plot '" + plot.title + "' has no drawable points");
  xa = make_axis(plot.logx, xlo, xhi);
  ya = make_axis(plot.logy, ylo, yhi);

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double t) { return kLeft + pw * (t - xa.lo) / (xa.hi - xa.lo); };
  auto py = [&](double t) { return kTop + ph * (1.0 - (t - ya.lo) / (ya.hi - ya.lo)); };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(plot.title)
    << "</text>\n";
  o << "<g stroke=\"#dddddd\">\n";
  for (double t : xa.ticks) o << "<line x1=\"" << fmt("%.2f", px(t)) << "\" y1=\"" << kTop << "\" x2=\"" << fmt("%.2f", px(t)) << "\" y2=\"" << kTop + ph << "\"/>\n";
  for (double t : ya.ticks) o << "<line x1=\"" << kLeft << "\" y1=\"" << fmt("%.2f", py(t)) << "\" x2=\"" << kLeft + pw << "\" y2=\"" << fmt("%.2f", py(t)) << "\"/>\n";
  o << "</g>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : xa.ticks) {
    o << "<text x=\"" << fmt("%.2f", px(t)) << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">"
      << xa.label(t) << "</text>\n";
  }
  for (double t : ya.ticks) {
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt("%.2f", py(t) + 4) << "\" text-anchor=\"end\">" << ya.label(t)
      << "</text>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 18 << "\" text-anchor=\"middle\">"
    << escape(plot.xlabel) << "</text>\n";
  o << "<text transform=\"translate(18," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(plot.ylabel) << "</text>\n";

  std::size_t k = 0;
  for (const auto& s : plot.series) {
    const char* color = kPalette[k % std::size(kPalette)];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (xa.usable(s.x[i]) && ya.usable(s.y[i])) pts.emplace_back(px(xa.transform(s.x[i])), py(ya.transform(s.y[i])));
    }
    if (s.line && pts.size() > 1) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        o << (i ? " " : "") << fmt("%.2f", pts[i].first) << ',' << fmt("%.2f", pts[i].second);
      }
      o << "\"/>\n";
    }
    for (const auto& [x, y] : pts) {
      o << "<circle cx=\"" << fmt("%.2f", x) << "\" cy=\"" << fmt("%.2f", y) << "\" r=\"3\" fill=\"" << color
        << "\"/>\n";
    }
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(k);
    o << "<rect x=\"" << kLeft + pw + 12 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\"" << color
      << "\"/>\n<text x=\"" << kLeft + pw + 28 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
    ++k;
  }
  o << "</svg>\n";
  return o.str();
}

PlotSpec plot_spec_from_json(const Json& j) {
  require(j.is_object(), ErrorKind::parse, "plot spec must be a JSON object");
  PlotSpec p;
  auto text = [&](const char* key, std::string& out) {
    if (!j.contains(key)) return;
    require(j[key].is_string(), ErrorKind::parse, std::string("plot field '") + key + "' must be a string");
    out = j[key].get<std::string>();
  };
  auto flag = [&](const char* key, bool& out) {
    if (!j.contains(key)) return;
    require(j[key].is_boolean(), ErrorKind::parse, std::string("plot field '") + key + "' must be a boolean");
    out = j[key].get<bool>();
  };
  text("file", p.file);
  text("title", p.title);
  text("xlabel", p.xlabel);
  text("ylabel", p.ylabel);
  flag("logx", p.logx);
  flag("logy", p.logy);
  require(j.contains("series") && j["series"].is_array(), ErrorKind::parse, "plot spec needs a 'series' array");
  for (const auto& s : j["series"]) {
    require(s.is_object(), ErrorKind::parse, "each series must be an object");
    Series out;
    if (s.contains("label")) {
      require(s["label"].is_string(), ErrorKind::parse, "series label must be a string");
      out.label = s["label"].get<std::string>();
    }
    if (s.contains("line")) {
      require(s["line"].is_boolean(), ErrorKind::parse, "series 'line' must be a boolean");
      out.line = s["line"].get<bool>();
    }
    for (const char* key : {"x", "y"}) {
      require(s.contains(key) && s[key].is_array(), ErrorKind::parse, std::string("series needs an array '") + key + "'");
      auto& dst = key[0] == 'x' ? out.x : out.y;
      for (const auto& v : s[key]) {
        require(v.is_number(), ErrorKind::parse, "series values must be numbers");
        dst.push_back(v.get<double>());
      }
    }
    p.series.push_back(std::move(out));
  }
  return p;
}

}  // namespace dlab
