#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace dlab {

using Vertex = std::size_t;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Power-law mean exit scaling F(r) = r^beta together with the volume
/// growth exponents alpha1 <= alpha2.
struct ScalingLaw {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double beta = 2.0;

  /// Validating constructor: 0 < alpha1 <= alpha2, beta > 1.
  static ScalingLaw make(double alpha1, double alpha2, double beta);

  double F(double r) const { return std::pow(r, beta); }
  double R(double t) const { return std::pow(t, 1.0 / beta); }
};

struct Neighbor {
  Vertex to;
  double conductance;
  double length;
};

struct Edge {
  Vertex i;
  Vertex j;
  double conductance;
  double length;
};

/// Finite connected weighted graph with vertex measure and shortest-path
/// metric. Immutable once built.
class GraphSpace {
 public:
  using Point = std::array<double, 3>;

  /// Edges may be given in any order and orientation; they are normalised to
  /// i < j and sorted. Throws Error(domain) on self-loops, duplicate edges,
  /// non-positive weights or measures, and on disconnected graphs.
  GraphSpace(std::string name, std::vector<double> measure, std::vector<Edge> edges,
             ScalingLaw scaling, std::vector<Point> coordinates = {});

  std::size_t size() const { return measure_.size(); }
  const std::string& name() const { return name_; }
  const ScalingLaw& scaling() const { return scaling_; }

  std::span<const Neighbor> neighbors(Vertex x) const {
    return {adjacency_.data() + offsets_[x], adjacency_.data() + offsets_[x + 1]};
  }
  double measure(Vertex x) const { return measure_[x]; }
  const std::vector<double>& measures() const { return measure_; }
  double total_measure() const { return total_measure_; }
  /// Sum of conductances at x.
  double degree(Vertex x) const { return degree_[x]; }
  /// Total jump rate of the associated walk, degree(x) / mu(x).
  double jump_rate(Vertex x) const { return degree_[x] / measure_[x]; }
  double max_jump_rate() const;
  double conductance(Vertex x, Vertex y) const;
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Point>& coordinates() const { return coordinates_; }
  double min_edge_length() const { return min_edge_length_; }

  /// Shortest-path distances from x. Vertices farther than `cutoff` are
  /// reported as +inf.
  std::vector<double> distances_from(Vertex x, double cutoff = kInf) const;
  double distance(Vertex x, Vertex y) const;
  /// Upper bound of the diameter from a double sweep (exact on trees and lattices).
  double diameter_estimate() const;

 private:
  std::string name_;
  std::vector<double> measure_;
  std::vector<Edge> edges_;
  ScalingLaw scaling_;
  std::vector<Point> coordinates_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<double> degree_;
  double total_measure_ = 0.0;
  double min_edge_length_ = 0.0;
};

/// Vertex subset with absorbing (Dirichlet) handling outside of it.
class DomainMask {
 public:
  static DomainMask whole(const GraphSpace& space);
  /// Sorted and deduplicated; throws on empty or out-of-range input.
  static DomainMask from_vertices(const GraphSpace& space, std::vector<Vertex> vertices);
  /// Open ball d(x, y) < r. Throws Error(geometry) when empty (r <= 0).
  static DomainMask ball(const GraphSpace& space, Vertex center, double r);

  std::size_t size() const { return vertices_.size(); }
  std::size_t space_size() const { return local_.size(); }
  std::span<const Vertex> vertices() const { return vertices_; }
  bool contains(Vertex x) const { return x < local_.size() && local_[x] >= 0; }
  /// Position of x inside vertices(), or -1.
  std::ptrdiff_t local_index(Vertex x) const { return local_[x]; }
  bool is_whole() const { return vertices_.size() == local_.size(); }
  bool subset_of(const DomainMask& other) const;
  /// Vertices outside this domain; throws Error(domain) when that set is empty.
  DomainMask complement() const;
  double measure(const GraphSpace& space) const;

 private:
  DomainMask(std::vector<Vertex> vertices, std::size_t n);
  std::vector<Vertex> vertices_;
  std::vector<std::ptrdiff_t> local_;
};

/// Level-n graph approximation of the planar Sierpinski gasket.
GraphSpace build_sierpinski_gasket(int level);

/// Cubic lattice box or torus; unit conductances, lengths and measure.
GraphSpace build_lattice(int dim, int extent, bool periodic);

/// Index of the lattice point with the given coordinates (row-major, x fastest).
Vertex lattice_vertex(int extent, std::span<const int> coords);

/// Ball volume V(x, r) = mu(B(x, r)) with the open-ball convention.
double volume(const GraphSpace& space, Vertex x, double r);

std::vector<Vertex> ball_vertices(const GraphSpace& space, Vertex x, double r);

/// Connected components of the subgraph induced on a domain.
std::vector<std::vector<Vertex>> induced_components(const GraphSpace& space, const DomainMask& domain);

/// Vertices outside `domain` adjacent to some vertex of it.
std::vector<Vertex> outer_boundary(const GraphSpace& space, const DomainMask& domain);

/// Vertices with degree below the maximum degree: box faces, gasket corners.
std::vector<Vertex> degree_deficient_vertices(const GraphSpace& space);

struct VolumeFitOptions {
  std::vector<Vertex> centers;  // empty: 8 vertices evenly spaced by index
  double r_min = 0.0;           // <= 0: twice the shortest edge
  double r_max = 0.0;           // <= 0: a quarter of the diameter estimate
};

struct VolumeExponents {
  double alpha1_hat;
  double alpha2_hat;
};

/// Least-squares slope of log V(x, r) against log r over dyadic radii, per
/// center; returns the smallest and largest slope. Throws Error(sampling) when
/// fewer than three radii give distinct volumes.
VolumeExponents fit_volume_exponents(const GraphSpace& space, const VolumeFitOptions& options = {});

}  // namespace dlab
