#include "dlab/space.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

#include "dlab/error.hpp"

namespace dlab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::size: return "size";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::recurrence: return "recurrence";
    case ErrorKind::domain: return "domain";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::sampling: return "sampling";
    case ErrorKind::instance: return "instance";
    case ErrorKind::range: return "range";
    case ErrorKind::parse: return "parse";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

ScalingLaw ScalingLaw::make(double alpha1, double alpha2, double beta) {
  require(alpha1 > 0.0 && alpha1 <= alpha2 && std::isfinite(alpha2), ErrorKind::domain,
          "scaling law needs 0 < alpha1 <= alpha2");
  require(beta > 1.0 && std::isfinite(beta), ErrorKind::domain, "scaling law needs beta > 1");
  return ScalingLaw{alpha1, alpha2, beta};
}

GraphSpace::GraphSpace(std::string name, std::vector<double> measure, std::vector<Edge> edges,
                       ScalingLaw scaling, std::vector<Point> coordinates)
    : name_(std::move(name)),
      measure_(std::move(measure)),
      edges_(std::move(edges)),
      scaling_(scaling),
      coordinates_(std::move(coordinates)) {
  const std::size_t n = measure_.size();
  require(n > 0, ErrorKind::domain, "graph space needs at least one vertex");
  require(coordinates_.empty() || coordinates_.size() == n, ErrorKind::domain,
          "coordinate count does not match vertex count");
  for (double m : measure_) {
    require(m > 0.0 && std::isfinite(m), ErrorKind::domain, "vertex measure must be positive and finite");
  }
  total_measure_ = std::accumulate(measure_.begin(), measure_.end(), 0.0);

  for (auto& e : edges_) {
    require(e.i < n && e.j < n, ErrorKind::domain, "edge endpoint out of range");
    require(e.i != e.j, ErrorKind::domain, "self-loops are not allowed");
    require(e.conductance > 0.0 && std::isfinite(e.conductance), ErrorKind::domain,
            "conductance must be positive and finite");
    require(e.length > 0.0 && std::isfinite(e.length), ErrorKind::domain,
            "edge length must be positive and finite");
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    require(edges_[k].i != edges_[k - 1].i || edges_[k].j != edges_[k - 1].j, ErrorKind::domain,
            "duplicate edge");
  }

  offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) {
    ++offsets_[e.i + 1];
    ++offsets_[e.j + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    adjacency_[fill[e.i]++] = Neighbor{e.j, e.conductance, e.length};
    adjacency_[fill[e.j]++] = Neighbor{e.i, e.conductance, e.length};
  }
  degree_.assign(n, 0.0);
  for (Vertex x = 0; x < n; ++x) {
    auto begin = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[x]);
    auto end = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[x + 1]);
    std::sort(begin, end, [](const Neighbor& a, const Neighbor& b) { return a.to < b.to; });
    for (auto it = begin; it != end; ++it) degree_[x] += it->conductance;
  }
  min_edge_length_ = kInf;
  for (const auto& e : edges_) min_edge_length_ = std::min(min_edge_length_, e.length);
  if (edges_.empty()) min_edge_length_ = 1.0;

  // Connectivity by breadth-first search.
  std::vector<char> seen(n, 0);
  std::vector<Vertex> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    Vertex x = stack.back();
    stack.pop_back();
    for (const auto& nb : neighbors(x)) {
      if (!seen[nb.to]) {
        seen[nb.to] = 1;
        ++reached;
        stack.push_back(nb.to);
      }
    }
  }
  require(reached == n, ErrorKind::domain, "graph space '" + name_ + "' is not connected");
}

double GraphSpace::max_jump_rate() const {
  double q = 0.0;
  for (Vertex x = 0; x < size(); ++x) q = std::max(q, jump_rate(x));
  return q;
}

double GraphSpace::conductance(Vertex x, Vertex y) const {
  auto nbs = neighbors(x);
  auto it = std::lower_bound(nbs.begin(), nbs.end(), y,
                             [](const Neighbor& a, Vertex v) { return a.to < v; });
  return (it != nbs.end() && it->to == y) ? it->conductance : 0.0;
}

std::vector<double> GraphSpace::distances_from(Vertex x, double cutoff) const {
  std::vector<double> dist(size(), kInf);
  using Item = std::pair<double, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[x] = 0.0;
  heap.emplace(0.0, x);
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (const auto& nb : neighbors(v)) {
      double nd = d + nb.length;
      if (nd < dist[nb.to] && nd <= cutoff) {
        dist[nb.to] = nd;
        heap.emplace(nd, nb.to);
      }
    }
  }
  return dist;
}

double GraphSpace::distance(Vertex x, Vertex y) const { return distances_from(x)[y]; }

double GraphSpace::diameter_estimate() const {
  auto far = [&](Vertex from) {
    auto d = distances_from(from);
    auto it = std::max_element(d.begin(), d.end());
    return std::pair<Vertex, double>{static_cast<Vertex>(it - d.begin()), *it};
  };
  auto [a, d0] = far(0);
  auto [b, d1] = far(a);
  (void)b;
  return std::max(d0, d1);
}

DomainMask::DomainMask(std::vector<Vertex> vertices, std::size_t n)
    : vertices_(std::move(vertices)), local_(n, -1) {
  for (std::size_t k = 0; k < vertices_.size(); ++k) local_[vertices_[k]] = static_cast<std::ptrdiff_t>(k);
}

DomainMask DomainMask::whole(const GraphSpace& space) {
  std::vector<Vertex> all(space.size());
  std::iota(all.begin(), all.end(), Vertex{0});
  return DomainMask(std::move(all), space.size());
}

DomainMask DomainMask::from_vertices(const GraphSpace& space, std::vector<Vertex> vertices) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  require(!vertices.empty(), ErrorKind::domain, "domain must be nonempty");
  require(vertices.back() < space.size(), ErrorKind::domain, "domain vertex out of range");
  return DomainMask(std::move(vertices), space.size());
}

DomainMask DomainMask::ball(const GraphSpace& space, Vertex center, double r) {
  auto v = ball_vertices(space, center, r);
  require(!v.empty(), ErrorKind::geometry, "ball is empty");
  return DomainMask(std::move(v), space.size());
}

bool DomainMask::subset_of(const DomainMask& other) const {
  return std::all_of(vertices_.begin(), vertices_.end(), [&](Vertex v) { return other.contains(v); });
}

DomainMask DomainMask::complement() const {
  std::vector<Vertex> rest;
  for (Vertex v = 0; v < local_.size(); ++v) {
    if (local_[v] < 0) rest.push_back(v);
  }
  require(!rest.empty(), ErrorKind::domain, "complement of the whole space is empty");
  return DomainMask(std::move(rest), local_.size());
}

double DomainMask::measure(const GraphSpace& space) const {
  double m = 0.0;
  for (Vertex v : vertices_) m += space.measure(v);
  return m;
}

GraphSpace build_sierpinski_gasket(int level) {
  require(level >= 0 && level <= 10, ErrorKind::size, "gasket level must lie in [0, 10]");
  // Corners live on the integer triangular lattice spanned by (1,0) and
  // (1/2, sqrt(3)/2); the level-n gasket has side 2^n in these units.
  const long side = 1L << level;
  std::map<std::pair<long, long>, Vertex> ids;
  std::vector<std::pair<long, long>> points;
  std::vector<int> incident;
  std::vector<std::pair<Vertex, Vertex>> pairs;
  auto id_of = [&](long a, long b) {
    auto [it, inserted] = ids.try_emplace({a, b}, points.size());
    if (inserted) {
      points.emplace_back(a, b);
      incident.push_back(0);
    }
    return it->second;
  };
  struct Cell {
    long a, b, s;
  };
  std::vector<Cell> stack{{0, 0, side}};
  while (!stack.empty()) {
    Cell c = stack.back();
    stack.pop_back();
    if (c.s == 1) {
      Vertex p = id_of(c.a, c.b), q = id_of(c.a + 1, c.b), r = id_of(c.a, c.b + 1);
      ++incident[p];
      ++incident[q];
      ++incident[r];
      pairs.emplace_back(p, q);
      pairs.emplace_back(q, r);
      pairs.emplace_back(p, r);
      continue;
    }
    long h = c.s / 2;
    // Push in reverse so the bottom-left cell is expanded first.
    stack.push_back({c.a, c.b + h, h});
    stack.push_back({c.a + h, c.b, h});
    stack.push_back({c.a, c.b, h});
  }
  const double length = std::ldexp(1.0, -level);
  const double conductance = std::pow(5.0 / 3.0, level);
  const double cell_mass = std::pow(3.0, -level);
  std::vector<double> measure(points.size());
  std::vector<GraphSpace::Point> coords(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    measure[k] = incident[k] * cell_mass;
    auto [a, b] = points[k];
    coords[k] = {(a + 0.5 * b) * length, (std::sqrt(3.0) / 2.0) * b * length, 0.0};
  }
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (auto [p, q] : pairs) edges.push_back(Edge{p, q, conductance, length});
  const double dim = std::log(3.0) / std::log(2.0);
  const double walk = std::log(5.0) / std::log(2.0);
  return GraphSpace("gasket-" + std::to_string(level), std::move(measure), std::move(edges),
                    ScalingLaw::make(dim, dim, walk), std::move(coords));
}

Vertex lattice_vertex(int extent, std::span<const int> coords) {
  Vertex idx = 0;
  Vertex stride = 1;
  for (int c : coords) {
    idx += static_cast<Vertex>(c) * stride;
    stride *= static_cast<Vertex>(extent);
  }
  return idx;
}

GraphSpace build_lattice(int dim, int extent, bool periodic) {
  require(dim >= 1 && dim <= 3, ErrorKind::domain, "lattice dimension must be 1, 2 or 3");
  require(extent >= 3, ErrorKind::size, "lattice extent must be at least 3");
  double count = std::pow(static_cast<double>(extent), dim);
  require(count <= 1e5, ErrorKind::size, "lattice exceeds 1e5 vertices");
  const std::size_t n = static_cast<std::size_t>(count);
  std::vector<GraphSpace::Point> coords(n);
  std::vector<Edge> edges;
  edges.reserve(n * static_cast<std::size_t>(dim));
  std::array<int, 3> c{0, 0, 0};
  for (Vertex v = 0; v < n; ++v) {
    Vertex rest = v;
    for (int d = 0; d < dim; ++d) {
      c[d] = static_cast<int>(rest % static_cast<Vertex>(extent));
      rest /= static_cast<Vertex>(extent);
    }
    coords[v] = {double(c[0]), double(c[1]), double(c[2])};
    for (int d = 0; d < dim; ++d) {
      if (c[d] + 1 < extent || periodic) {
        auto nc = c;
        nc[d] = (c[d] + 1) % extent;
        edges.push_back(Edge{v, lattice_vertex(extent, std::span<const int>(nc.data(), dim)), 1.0, 1.0});
      }
    }
  }
  std::ostringstream name;
  name << (periodic ? "torus-" : "box-") << dim << "d-" << extent;
  return GraphSpace(name.str(), std::vector<double>(n, 1.0), std::move(edges),
                    ScalingLaw::make(dim, dim, 2.0), std::move(coords));
}

std::vector<Vertex> ball_vertices(const GraphSpace& space, Vertex x, double r) {
  require(x < space.size(), ErrorKind::domain, "center out of range");
  if (!(r > 0.0)) return {};
  auto d = space.distances_from(x, r);
  std::vector<Vertex> out;
  for (Vertex y = 0; y < space.size(); ++y) {
    if (d[y] < r) out.push_back(y);
  }
  return out;
}

double volume(const GraphSpace& space, Vertex x, double r) {
  require(r >= 0.0, ErrorKind::domain, "radius must be nonnegative");
  double v = 0.0;
  for (Vertex y : ball_vertices(space, x, r)) v += space.measure(y);
  return v;
}

std::vector<std::vector<Vertex>> induced_components(const GraphSpace& space, const DomainMask& domain) {
  std::vector<char> seen(space.size(), 0);
  std::vector<std::vector<Vertex>> out;
  for (Vertex s : domain.vertices()) {
    if (seen[s]) continue;
    std::vector<Vertex> comp{s};
    seen[s] = 1;
    for (std::size_t k = 0; k < comp.size(); ++k) {
      for (const auto& nb : space.neighbors(comp[k])) {
        if (domain.contains(nb.to) && !seen[nb.to]) {
          seen[nb.to] = 1;
          comp.push_back(nb.to);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<Vertex> outer_boundary(const GraphSpace& space, const DomainMask& domain) {
  std::vector<char> mark(space.size(), 0);
  for (Vertex x : domain.vertices()) {
    for (const auto& nb : space.neighbors(x)) {
      if (!domain.contains(nb.to)) mark[nb.to] = 1;
    }
  }
  std::vector<Vertex> out;
  for (Vertex v = 0; v < space.size(); ++v) {
    if (mark[v]) out.push_back(v);
  }
  return out;
}

std::vector<Vertex> degree_deficient_vertices(const GraphSpace& space) {
  std::size_t max_deg = 0;
  for (Vertex x = 0; x < space.size(); ++x) max_deg = std::max(max_deg, space.neighbors(x).size());
  std::vector<Vertex> out;
  for (Vertex x = 0; x < space.size(); ++x) {
    if (space.neighbors(x).size() < max_deg) out.push_back(x);
  }
  return out;
}

VolumeExponents fit_volume_exponents(const GraphSpace& space, const VolumeFitOptions& options) {
  std::vector<Vertex> centers = options.centers;
  if (centers.empty()) {
    const std::size_t k = std::min<std::size_t>(8, space.size());
    for (std::size_t i = 0; i < k; ++i) centers.push_back((2 * i + 1) * space.size() / (2 * k));
  }
  const double r_min = options.r_min > 0.0 ? options.r_min : 2.0 * space.min_edge_length();
  const double r_max = options.r_max > 0.0 ? options.r_max : 0.25 * space.diameter_estimate();
  std::vector<double> radii;
  for (double r = r_min; r <= r_max * (1.0 + 1e-12); r *= 2.0) radii.push_back(r);

  double lo = kInf, hi = -kInf;
  for (Vertex x : centers) {
    require(x < space.size(), ErrorKind::domain, "center out of range");
    auto dist = space.distances_from(x, r_max);
    std::vector<double> lx, ly;
    double last = -1.0;
    for (double r : radii) {
      double v = 0.0;
      for (Vertex y = 0; y < space.size(); ++y) {
        if (dist[y] < r) v += space.measure(y);
      }
      if (v > last) {
        lx.push_back(std::log(r));
        ly.push_back(std::log(v));
        last = v;
      }
    }
    require(lx.size() >= 3, ErrorKind::sampling,
            "volume fit needs at least 3 radii with distinct ball volumes");
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      sxy += (lx[k] - mx) * (ly[k] - my);
      sxx += (lx[k] - mx) * (lx[k] - mx);
    }
    const double slope = sxy / sxx;
    lo = std::min(lo, slope);
    hi = std::max(hi, slope);
  }
  return {lo, hi};
}

}  // namespace dlab
