#include "slpos/scenario.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "slpos/errors.hpp"

namespace slpos {

namespace {

constexpr std::uint64_t kDropTag = 0x0d;
constexpr std::uint64_t kSelectTag = 0x5e;

bool is_anchor_candidate(const Node& node) {
  return node.role == NodeRole::AnchorUe || node.role == NodeRole::Rsu ||
         node.role == NodeRole::Bs;
}

void validate_layout(const Layout& layout) {
  if (const auto* hw = std::get_if<HighwayDrop>(&layout)) {
    if (hw->num_lanes <= 0 || hw->lane_width_m <= 0.0 ||
        hw->segment_length_m <= 0.0) {
      throw ConfigurationError("highway layout dimensions must be > 0");
    }
    if (!(hw->vehicle_density_per_m > 0.0 && hw->vehicle_density_per_m <= 1.0)) {
      throw ConfigurationError("vehicle_density_per_m must be in (0, 1]");
    }
  } else if (const auto* ug = std::get_if<UrbanGrid>(&layout)) {
    if (ug->block_size_m <= 0.0 || ug->road_width_m <= 0.0 ||
        ug->grid_extent_m <= 0.0) {
      throw ConfigurationError("urban grid dimensions must be > 0");
    }
  } else if (const auto* inf = std::get_if<IndoorFactory>(&layout)) {
    if (inf->hall_length_m <= 0.0 || inf->hall_width_m <= 0.0) {
      throw ConfigurationError("indoor factory dimensions must be > 0");
    }
    if (!(inf->clutter_density > 0.0 && inf->clutter_density <= 1.0)) {
      throw ConfigurationError("clutter_density must be in (0, 1]");
    }
  } else {
    const auto& custom = std::get<CustomFixed>(layout);
    std::set<NodeId> ids;
    int targets = 0;
    for (const Node& node : custom.nodes) {
      if (!all_finite(node.position)) {
        throw ConfigurationError("custom node positions must be finite");
      }
      if (node.speed_mps < 0.0) {
        throw ConfigurationError("node speed must be >= 0");
      }
      if (!ids.insert(node.id).second) {
        throw ConfigurationError("duplicate node id in custom layout");
      }
      if (node.role == NodeRole::TargetUe) ++targets;
    }
    if (targets != 1) {
      throw ConfigurationError("custom layout needs exactly one target UE");
    }
  }
}

}  // namespace

void validate(const ScenarioConfig& config) {
  validate_layout(config.layout);
  if (config.n_anchors < 1) {
    throw ConfigurationError("n_anchors must be >= 1");
  }
}

BoundingBox layout_bounds(const Layout& layout) {
  if (const auto* hw = std::get_if<HighwayDrop>(&layout)) {
    return {{0.0, 0.0, 0.0},
            {hw->segment_length_m, hw->num_lanes * hw->lane_width_m, 0.0}};
  }
  if (const auto* ug = std::get_if<UrbanGrid>(&layout)) {
    return {{0.0, 0.0, 0.0}, {ug->grid_extent_m, ug->grid_extent_m, 0.0}};
  }
  if (const auto* inf = std::get_if<IndoorFactory>(&layout)) {
    return {{0.0, 0.0, 0.0}, {inf->hall_length_m, inf->hall_width_m, 0.0}};
  }
  const auto& custom = std::get<CustomFixed>(layout);
  BoundingBox box{{std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity()},
                  {-std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity()}};
  for (const Node& node : custom.nodes) {
    box.lo.x = std::min(box.lo.x, node.position.x);
    box.lo.y = std::min(box.lo.y, node.position.y);
    box.lo.z = std::min(box.lo.z, node.position.z);
    box.hi.x = std::max(box.hi.x, node.position.x);
    box.hi.y = std::max(box.hi.y, node.position.y);
    box.hi.z = std::max(box.hi.z, node.position.z);
  }
  return box;
}

Scenario generate(const ScenarioConfig& config) {
  validate(config);

  Scenario scenario;
  scenario.seed = config.seed;
  scenario.dimensionality = config.dimensionality;

  if (const auto* custom = std::get_if<CustomFixed>(&config.layout)) {
    scenario.nodes = custom->nodes;
    for (const Node& node : scenario.nodes) {
      if (node.role == NodeRole::TargetUe) scenario.target_id = node.id;
    }
    return scenario;
  }

  RngStream rng(derive_seed(config.seed, kDropTag));
  const BoundingBox box = layout_bounds(config.layout);

  Node target;
  target.id = 0;
  target.role = NodeRole::TargetUe;
  target.position = {rng.uniform(box.lo.x, box.hi.x),
                     rng.uniform(box.lo.y, box.hi.y), 0.0};
  scenario.target_id = target.id;
  scenario.nodes.push_back(target);

  int n_candidates = config.n_anchors;
  if (const auto* hw = std::get_if<HighwayDrop>(&config.layout)) {
    n_candidates = static_cast<int>(std::llround(
        hw->vehicle_density_per_m * hw->segment_length_m * hw->num_lanes));
    if (n_candidates < config.n_anchors) {
      throw ConfigurationError(
          "highway layout cannot host n_anchors candidates at this density");
    }
  }

  for (int i = 0; i < n_candidates; ++i) {
    Node anchor;
    anchor.id = i + 1;
    anchor.role = NodeRole::AnchorUe;
    if (const auto* hw = std::get_if<HighwayDrop>(&config.layout)) {
      // vehicles wander laterally within their lane by up to a quarter width
      const int lane = static_cast<int>(rng.uniform_int(hw->num_lanes));
      const double wander =
          rng.uniform(-0.25 * hw->lane_width_m, 0.25 * hw->lane_width_m);
      anchor.position = {rng.uniform(0.0, hw->segment_length_m),
                         (lane + 0.5) * hw->lane_width_m + wander, 0.0};
    } else if (const auto* ug = std::get_if<UrbanGrid>(&config.layout)) {
      // Drop onto a random street of the lattice.
      const double pitch = ug->block_size_m + ug->road_width_m;
      const int n_streets =
          std::max(1, static_cast<int>(ug->grid_extent_m / pitch) + 1);
      const bool horizontal = rng.uniform() < 0.5;
      const int street = static_cast<int>(rng.uniform_int(n_streets));
      const double center = std::min(street * pitch + 0.5 * ug->road_width_m,
                                     ug->grid_extent_m);
      const double along = rng.uniform(0.0, ug->grid_extent_m);
      double lateral = center + rng.uniform(-0.5 * ug->road_width_m,
                                            0.5 * ug->road_width_m);
      lateral = std::clamp(lateral, 0.0, ug->grid_extent_m);
      anchor.position = horizontal ? Position{along, lateral, 0.0}
                                   : Position{lateral, along, 0.0};
    } else {
      anchor.position = {rng.uniform(box.lo.x, box.hi.x),
                         rng.uniform(box.lo.y, box.hi.y), 0.0};
    }
    scenario.nodes.push_back(anchor);
  }
  return scenario;
}

const Node& node_by_id(const Scenario& scenario, NodeId id) {
  for (const Node& node : scenario.nodes) {
    if (node.id == id) return node;
  }
  throw UsageError("unknown node id");
}

std::vector<NodeId> select_anchors(const Scenario& scenario, NodeId target_id,
                                   int k, AnchorPolicy policy) {
  const Node& target = node_by_id(scenario, target_id);

  struct Candidate {
    NodeId id;
    double dist;
    Position position;
  };
  std::vector<Candidate> candidates;
  for (const Node& node : scenario.nodes) {
    if (node.id == target_id || !is_anchor_candidate(node)) continue;
    candidates.push_back(
        {node.id, distance(node.position, target.position), node.position});
  }
  if (static_cast<int>(candidates.size()) < k) {
    throw SelectionError("fewer candidate anchors than requested");
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    return a.dist != b.dist ? a.dist < b.dist : a.id < b.id;
  });

  std::vector<NodeId> picked;
  picked.reserve(k);

  switch (policy) {
    case AnchorPolicy::Nearest:
      for (int i = 0; i < k; ++i) picked.push_back(candidates[i].id);
      break;

    case AnchorPolicy::Random: {
      RngStream rng(derive_seed(scenario.seed, kSelectTag, target_id));
      std::vector<Candidate> pool = candidates;
      for (int i = 0; i < k; ++i) {
        const auto j = i + rng.uniform_int(pool.size() - i);
        std::swap(pool[i], pool[j]);
        picked.push_back(pool[i].id);
      }
      break;
    }

    case AnchorPolicy::BestGdop: {
      // Greedy, seeded with the nearest anchor. While the selected set is
      // still too small for gdop() the candidates tie at +inf and the
      // distance tie-break effectively keeps picking nearest.
      std::vector<Candidate> pool = candidates;
      std::vector<Position> positions;
      picked.push_back(pool.front().id);
      positions.push_back(pool.front().position);
      pool.erase(pool.begin());
      while (static_cast<int>(picked.size()) < k) {
        std::size_t best = 0;
        double best_score = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pool.size(); ++i) {
          positions.push_back(pool[i].position);
          double score;
          try {
            score = gdop(positions, target.position, scenario.dimensionality);
          } catch (const GeometryError&) {
            score = std::numeric_limits<double>::infinity();
          }
          positions.pop_back();
          if (score < best_score) {
            best_score = score;
            best = i;
          }
        }
        picked.push_back(pool[best].id);
        positions.push_back(pool[best].position);
        pool.erase(pool.begin() + best);
      }
      break;
    }
  }
  return picked;
}

double gdop(std::span<const Position> anchor_positions, const Position& target,
            Dimensionality dim) {
  const int spatial = dim == Dimensionality::TwoD ? 2 : 3;
  const int cols = spatial + 1;
  const int n = static_cast<int>(anchor_positions.size());
  if (n < cols) {
    // the augmented matrix needs at least dimensionality+1 rows
    throw GeometryError("too few anchors for gdop");
  }

  // Collinear (2-D) or coplanar (3-D) anchor sets are degenerate drops even
  // when the augmented matrix happens to be invertible for an off-axis
  // target: check the anchor scatter directly.
  {
    Eigen::MatrixXd centered(n, spatial);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(spatial);
    for (int i = 0; i < n; ++i) {
      mean(0) += anchor_positions[i].x;
      mean(1) += anchor_positions[i].y;
      if (spatial == 3) mean(2) += anchor_positions[i].z;
    }
    mean /= n;
    for (int i = 0; i < n; ++i) {
      centered(i, 0) = anchor_positions[i].x - mean(0);
      centered(i, 1) = anchor_positions[i].y - mean(1);
      if (spatial == 3) centered(i, 2) = anchor_positions[i].z - mean(2);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> scatter(
        centered.transpose() * centered);
    const double max_eig = scatter.eigenvalues().maxCoeff();
    const double min_eig = scatter.eigenvalues().minCoeff();
    if (!(max_eig > 0.0) || min_eig <= 1e-10 * max_eig) {
      throw GeometryError(spatial == 2 ? "collinear anchors"
                                       : "coplanar anchors");
    }
  }

  Eigen::MatrixXd h(n, cols);
  for (int i = 0; i < n; ++i) {
    const Position diff = target - anchor_positions[i];
    const double d = norm(diff);
    if (d <= 0.0) {
      throw GeometryError("anchor coincides with target");
    }
    h(i, 0) = diff.x / d;
    h(i, 1) = diff.y / d;
    if (spatial == 3) h(i, 2) = diff.z / d;
    h(i, cols - 1) = 1.0;
  }

  const Eigen::MatrixXd normal = h.transpose() * h;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) {
    throw GeometryError("singular anchor geometry");
  }
  const double trace = lu.inverse().trace();
  if (!(trace > 0.0) || !std::isfinite(trace)) {
    throw GeometryError("singular anchor geometry");
  }
  return std::sqrt(trace);
}

}  // namespace slpos
