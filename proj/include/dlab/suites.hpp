#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlab/inequalities.hpp"

namespace dlab {

using Json = nlohmann::json;

/// "gasket:5", "lattice:2:48", "lattice:2:16:periodic", "path:41".
struct SpaceSpec {
  std::string kind = "lattice";
  int level = 0;  // gasket
  int dim = 1;    // lattice
  int extent = 3;
  bool periodic = false;

  std::string label() const;
  Json to_json() const;
};

SpaceSpec parse_space_spec(const std::string& text);
SpaceSpec space_spec_from_json(const Json& j);
GraphSpace build_space(const SpaceSpec& spec);

/// FNV-1a 64-bit of the text, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& text);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool line = false;
};

struct PlotSpec {
  std::string file;  // name inside plots/
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  std::vector<Series> series;
};

/// One certificate instance; `inputs` is canonical and hashed into `digest`.
struct InstanceRecord {
  std::string tag;
  Json inputs;
  std::string digest;
  double lhs = std::numeric_limits<double>::quiet_NaN();
  double rhs = std::numeric_limits<double>::quiet_NaN();
  Json constants = Json::object();
  Json details = Json::object();
  bool pass = false;
  std::string error;  // "<kind>: message" when the instance raised
  double runtime = 0.0;
};

struct SuiteCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double limit = 0.0;
  std::string note;
};

struct SuiteResult {
  std::string kind;
  std::vector<InstanceRecord> instances;
  std::vector<SuiteCheck> checks;
  Json summary = Json::object();
  std::vector<PlotSpec> plots;
  bool pass() const;
  std::vector<std::string> failing_digests() const;
};

/// Sets `digest` from `inputs`.
void seal(InstanceRecord& rec);

struct ExplicitHittingInstance {
  std::size_t space = 0;  // index into HittingParams::spaces
  Vertex o = 0;
  std::vector<Vertex> K;
  double r = 0.0;
};

struct HittingParams {
  std::vector<SpaceSpec> spaces;
  std::size_t instances = 100;  // per space
  std::uint64_t seed = 1;
  double eta = kDefaultEta;
  double r_min = 2.0;           // in units of the shortest edge
  double r_max = 8.0;
  double target_radius_max = 2.5;
  std::vector<ExplicitHittingInstance> explicit_instances;
};

struct LiebParams {
  SpaceSpec space;
  std::size_t instances = 30;
  std::uint64_t seed = 1;
  int side_min = 10;
  int side_max = 24;
  double well_radius_min = 1.0;
  double well_radius_max = 3.0;
  double depth_min = 0.5;
  double depth_max = 4.0;
  int max_mode = 2;  // eigenpair index drawn from 0..max_mode
  double epsilon = 0.5;
  std::vector<double> epsilons{0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<double> kappas;  // empty: 61 log-spaced values in [1e-2, 1e4]
  double eta = kDefaultEta;
  double p = 2.0;
};

struct KellerParams {
  std::vector<SpaceSpec> spaces;
  std::size_t geometries = 12;  // per space
  std::uint64_t seed = 1;
  double p = 2.0;
  int side_min = 6;
  int side_max = 20;
  double well_radius_max = 2.0;
  std::vector<double> depths{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  int max_mode = 2;
  double band = 3.0;
};

struct WavelengthParams {
  SpaceSpec space;
  std::size_t domains = 4;
  std::size_t eigenpairs = 5;  // per domain
  std::uint64_t seed = 1;
  int side_min = 8;
  int side_max = 24;
  double band = 3.0;
};

struct LiouvilleParams {
  int dim = 3;
  std::vector<int> extents{16, 24, 32};
  double ball_radius = 1.0;
  double p = 2.0;
  double band = 5.0;
  // Potential profile on one box; extent 0 disables it.
  int potential_extent = 0;
  double potential_kappa = 0.25;
  std::vector<double> potential_radii{4.0, 6.0, 8.0};
  std::size_t potential_stride = 1;
};

struct RecurrentParams {
  int dim = 2;
  std::vector<int> extents{16, 32, 64};
  int control_dim = 3;
  std::vector<int> control_extents{16, 32, 46};
  double ball_radius = 2.0;
  int distance = 4;
  OuterBoundary boundary = OuterBoundary::absorbing;
  double final_min = 0.99;
  double control_max = 0.9;
};

struct FkParams {
  std::vector<SpaceSpec> spaces;
  std::size_t instances = 30;  // per space
  std::uint64_t seed = 1;
  int side_min = 5;
  int side_max = 9;
  double well_radius_min = 1.0;
  double well_radius_max = 2.0;
  double depth_min = 1.0;
  double depth_max = 8.0;
  double band = 3.0;
};

SuiteResult run_hitting_suite(const HittingParams& params);
SuiteResult run_lieb_suite(const LiebParams& params);
SuiteResult run_keller_suite(const KellerParams& params);
SuiteResult run_wavelength_suite(const WavelengthParams& params);
SuiteResult run_liouville_suite(const LiouvilleParams& params);
SuiteResult run_recurrent_suite(const RecurrentParams& params);
SuiteResult run_fk_suite(const FkParams& params);

}  // namespace dlab
