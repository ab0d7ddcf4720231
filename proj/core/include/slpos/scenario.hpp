#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "slpos/clock.hpp"
#include "slpos/geometry.hpp"

namespace slpos {

using NodeId = int;

enum class NodeRole { TargetUe, AnchorUe, Rsu, Bs };

struct Node {
  NodeId id = 0;
  NodeRole role = NodeRole::AnchorUe;
  Position position;
  double speed_mps = 0.0;  // mobility class metadata; drops are static
  ClockState clock;
};

// Vehicles dropped on parallel lanes along x; lane count times lane width
// spans y.
struct HighwayDrop {
  int num_lanes = 3;
  double lane_width_m = 4.0;
  double segment_length_m = 500.0;
  double vehicle_density_per_m = 0.02;  // per lane-meter
};

// Manhattan street lattice: roads of road_width_m every block_size_m, over a
// square of grid_extent_m per side. Anchors drop onto the road network.
struct UrbanGrid {
  double block_size_m = 100.0;
  double road_width_m = 10.0;
  double grid_extent_m = 500.0;
};

struct IndoorFactory {
  double hall_length_m = 100.0;
  double hall_width_m = 60.0;
  double clutter_density = 0.4;  // descriptive, in (0,1]; presets mirror it
                                 // into channel parameters
};

// Hand-authored node list, passed through verbatim.
struct CustomFixed {
  std::vector<Node> nodes;
};

using Layout = std::variant<HighwayDrop, UrbanGrid, IndoorFactory, CustomFixed>;

enum class AnchorPolicy { Nearest, Random, BestGdop };
enum class Dimensionality { TwoD, ThreeD };

struct ScenarioConfig {
  Layout layout;
  int n_anchors = 4;
  AnchorPolicy anchor_policy = AnchorPolicy::Nearest;
  Dimensionality dimensionality = Dimensionality::TwoD;
  std::uint64_t seed = 1;
};

struct Scenario {
  std::vector<Node> nodes;
  NodeId target_id = 0;
  std::uint64_t seed = 0;
  Dimensionality dimensionality = Dimensionality::TwoD;
};

struct BoundingBox {
  Position lo;
  Position hi;
};

void validate(const ScenarioConfig& config);

// Axis-aligned bounds every generated position must lie in. For CustomFixed
// this is the hull of the authored nodes.
BoundingBox layout_bounds(const Layout& layout);

// Deterministic drop: the same config (seed included) always produces the
// identical node list. Throws ConfigurationError when the layout cannot host
// n_anchors distinct candidates.
Scenario generate(const ScenarioConfig& config);

const Node& node_by_id(const Scenario& scenario, NodeId id);

// Picks k anchor ids for the given target. Nearest sorts by 3-D distance with
// ties broken by lower id; BestGdop grows the set greedily from the nearest
// anchor, minimizing gdop() at each addition.
std::vector<NodeId> select_anchors(const Scenario& scenario, NodeId target_id,
                                   int k, AnchorPolicy policy);

// Geometric dilution of precision from unit line-of-sight vectors, rows
// augmented with the usual clock column: sqrt(trace((H^T H)^-1)).
// Throws GeometryError for singular geometry (collinear in 2-D, coplanar in
// 3-D, or too few anchors).
double gdop(std::span<const Position> anchor_positions, const Position& target,
            Dimensionality dim);

// JSON round trip for hand-authored layouts. Schema: an object with a "nodes"
// array ({id, role, x, y, z, speed_mps}) plus "target_id" and "seed".
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(std::string_view text);

}  // namespace slpos
