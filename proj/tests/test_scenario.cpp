#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "slpos/errors.hpp"
#include "slpos/scenario.hpp"

using namespace slpos;

namespace {

Node make_node(NodeId id, NodeRole role, double x, double y, double z = 0.0) {
  Node n;
  n.id = id;
  n.role = role;
  n.position = {x, y, z};
  return n;
}

ScenarioConfig custom_config(std::vector<Node> nodes, int n_anchors = 3) {
  ScenarioConfig config;
  config.layout = CustomFixed{std::move(nodes)};
  config.n_anchors = n_anchors;
  config.seed = 1;
  return config;
}

bool same_nodes(const std::vector<Node>& a, const std::vector<Node>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].id != b[i].id || a[i].role != b[i].role ||
        !(a[i].position == b[i].position) || a[i].speed_mps != b[i].speed_mps) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("custom layouts pass through verbatim") {
  const ScenarioConfig config = custom_config({
      make_node(0, NodeRole::TargetUe, 0, 0),
      make_node(1, NodeRole::AnchorUe, 100, 0),
      make_node(2, NodeRole::AnchorUe, 0, 100),
      make_node(3, NodeRole::AnchorUe, -100, 0),
  });
  const Scenario scenario = generate(config);
  REQUIRE(scenario.nodes.size() == 4);
  CHECK(scenario.target_id == 0);
  CHECK(scenario.nodes[1].position == Position{100, 0, 0});
  CHECK(scenario.nodes[3].position == Position{-100, 0, 0});
}

TEST_CASE("generate is a pure function of the config") {
  ScenarioConfig config;
  config.layout = HighwayDrop{3, 4.0, 500.0, 0.02};
  config.n_anchors = 4;
  config.seed = 7;
  const Scenario a = generate(config);
  const Scenario b = generate(config);
  CHECK(same_nodes(a.nodes, b.nodes));
  CHECK(a.target_id == b.target_id);

  config.seed = 8;
  const Scenario c = generate(config);
  CHECK_FALSE(same_nodes(a.nodes, c.nodes));
}

TEST_CASE("highway drops stay inside the lane band across 1000 seeds") {
  ScenarioConfig config;
  config.layout = HighwayDrop{3, 4.0, 500.0, 0.02};
  config.n_anchors = 4;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    config.seed = seed;
    const Scenario scenario = generate(config);
    REQUIRE(scenario.nodes.size() == 31);  // target + 0.02 * 500 * 3 vehicles
    for (const Node& node : scenario.nodes) {
      REQUIRE(node.position.x >= 0.0);
      REQUIRE(node.position.x <= 500.0);
      REQUIRE(node.position.y >= 0.0);
      REQUIRE(node.position.y <= 12.0);
    }
  }
}

TEST_CASE("urban and indoor drops respect their layout bounds") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    ScenarioConfig config;
    config.n_anchors = 6;
    config.seed = seed;

    config.layout = UrbanGrid{100.0, 10.0, 400.0};
    for (const Node& node : generate(config).nodes) {
      const BoundingBox box = layout_bounds(config.layout);
      REQUIRE(node.position.x >= box.lo.x);
      REQUIRE(node.position.x <= box.hi.x);
      REQUIRE(node.position.y >= box.lo.y);
      REQUIRE(node.position.y <= box.hi.y);
    }

    config.layout = IndoorFactory{120.0, 60.0, 0.4};
    for (const Node& node : generate(config).nodes) {
      REQUIRE(node.position.x >= 0.0);
      REQUIRE(node.position.x <= 120.0);
      REQUIRE(node.position.y >= 0.0);
      REQUIRE(node.position.y <= 60.0);
    }
  }
}

TEST_CASE("infeasible highway density is a configuration error") {
  ScenarioConfig config;
  config.layout = HighwayDrop{1, 4.0, 100.0, 0.02};  // 2 vehicles
  config.n_anchors = 4;
  CHECK_THROWS_AS(generate(config), ConfigurationError);
}

TEST_CASE("nearest selection picks the smallest distances") {
  const Scenario scenario = generate(custom_config({
      make_node(0, NodeRole::TargetUe, 0, 0),
      make_node(1, NodeRole::AnchorUe, 30, 0),
      make_node(2, NodeRole::AnchorUe, 10, 0),
      make_node(3, NodeRole::AnchorUe, 20, 0),
  }));
  const auto picked = select_anchors(scenario, 0, 2, AnchorPolicy::Nearest);
  REQUIRE(picked.size() == 2);
  CHECK(picked[0] == 2);
  CHECK(picked[1] == 3);
}

TEST_CASE("nearest selection breaks distance ties by lower id") {
  const Scenario scenario = generate(custom_config({
      make_node(0, NodeRole::TargetUe, 0, 0),
      make_node(5, NodeRole::AnchorUe, 0, 10),
      make_node(2, NodeRole::AnchorUe, 10, 0),
  }));
  const auto picked = select_anchors(scenario, 0, 1, AnchorPolicy::Nearest);
  REQUIRE(picked.size() == 1);
  CHECK(picked[0] == 2);
}

TEST_CASE("nearest selection output is sorted by distance") {
  ScenarioConfig config;
  config.layout = HighwayDrop{3, 4.0, 500.0, 0.05};
  config.n_anchors = 8;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    config.seed = seed;
    const Scenario scenario = generate(config);
    const Node& target = node_by_id(scenario, scenario.target_id);
    const auto picked = select_anchors(scenario, scenario.target_id, 8,
                                       AnchorPolicy::Nearest);
    double prev = 0.0;
    for (NodeId id : picked) {
      const double d = distance(node_by_id(scenario, id).position, target.position);
      REQUIRE(d >= prev);
      prev = d;
    }
  }
}

TEST_CASE("selection beyond the candidate pool fails") {
  const Scenario scenario = generate(custom_config({
      make_node(0, NodeRole::TargetUe, 0, 0),
      make_node(1, NodeRole::AnchorUe, 10, 0),
  }));
  CHECK_THROWS_AS(select_anchors(scenario, 0, 2, AnchorPolicy::Nearest),
                  SelectionError);
}

TEST_CASE("random selection is deterministic and returns distinct ids") {
  const Scenario scenario = generate(custom_config({
      make_node(0, NodeRole::TargetUe, 0, 0),
      make_node(1, NodeRole::AnchorUe, 10, 0),
      make_node(2, NodeRole::AnchorUe, 20, 0),
      make_node(3, NodeRole::AnchorUe, 30, 0),
      make_node(4, NodeRole::AnchorUe, 40, 0),
  }));
  const auto a = select_anchors(scenario, 0, 3, AnchorPolicy::Random);
  const auto b = select_anchors(scenario, 0, 3, AnchorPolicy::Random);
  CHECK(a == b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::unique(sorted.begin(), sorted.end()) == sorted.end());
  for (NodeId id : a) CHECK(id != 0);
}

TEST_CASE("greedy gdop selection is within 10 percent of exhaustive") {
  std::vector<Node> nodes{make_node(0, NodeRole::TargetUe, 0, 0)};
  std::vector<Position> anchor_positions;
  for (int i = 0; i < 8; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / 8.0 + 0.2;
    const double radius = 40.0 + 5.0 * (i % 3);
    const Position p{radius * std::cos(angle), radius * std::sin(angle), 0.0};
    nodes.push_back(make_node(i + 1, NodeRole::AnchorUe, p.x, p.y));
    anchor_positions.push_back(p);
  }
  const Scenario scenario = generate(custom_config(std::move(nodes), 4));

  const auto picked =
      select_anchors(scenario, 0, 4, AnchorPolicy::BestGdop);
  REQUIRE(picked.size() == 4);
  std::vector<Position> greedy_positions;
  for (NodeId id : picked) {
    greedy_positions.push_back(node_by_id(scenario, id).position);
  }
  const double greedy_gdop =
      gdop(greedy_positions, {0, 0, 0}, Dimensionality::TwoD);

  // exhaustive minimum over all C(8,4) subsets
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 8; ++a)
    for (int b = a + 1; b < 8; ++b)
      for (int c = b + 1; c < 8; ++c)
        for (int d = c + 1; d < 8; ++d) {
          const std::vector<Position> subset{
              anchor_positions[a], anchor_positions[b], anchor_positions[c],
              anchor_positions[d]};
          best = std::min(best, gdop(subset, {0, 0, 0}, Dimensionality::TwoD));
        }
  CHECK(greedy_gdop <= 1.10 * best);
}

TEST_CASE("gdop of the four cardinal anchors matches direct evaluation") {
  const std::vector<Position> anchors{
      {0, 1, 0}, {0, -1, 0}, {1, 0, 0}, {-1, 0, 0}};
  // Direct evaluation of sqrt(trace((H^T H)^-1)) with rows [ux, uy, 1]:
  // H^T H = diag(2, 2, 4), so the trace of the inverse is 1/2 + 1/2 + 1/4.
  const double expected = std::sqrt(0.5 + 0.5 + 0.25);
  CHECK(gdop(anchors, {0, 0, 0}, Dimensionality::TwoD) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(gdop(anchors, {0, 0, 0}, Dimensionality::TwoD) ==
        doctest::Approx(1.1180339887).epsilon(1e-9));
}

TEST_CASE("collinear anchors are a geometry error in 2-D") {
  const std::vector<Position> anchors{{-10, 0, 0}, {0, 0, 0}, {10, 0, 0}};
  CHECK_THROWS_AS(gdop(anchors, {0, 5, 0}, Dimensionality::TwoD), GeometryError);
}

TEST_CASE("too few anchors for gdop") {
  const std::vector<Position> anchors{{1, 0, 0}, {0, 1, 0}};
  CHECK_THROWS_AS(gdop(anchors, {0, 0, 0}, Dimensionality::TwoD), GeometryError);
}

TEST_CASE("gdop is invariant under uniform scaling and rigid rotation") {
  RngStream rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Position> anchors;
    for (int i = 0; i < 5; ++i) {
      anchors.push_back({rng.uniform(-100, 100), rng.uniform(-100, 100), 0.0});
    }
    const Position target{rng.uniform(-20, 20), rng.uniform(-20, 20), 0.0};
    double reference;
    try {
      reference = gdop(anchors, target, Dimensionality::TwoD);
    } catch (const GeometryError&) {
      continue;  // nearly-degenerate random draw
    }

    std::vector<Position> scaled;
    for (const Position& p : anchors) scaled.push_back(10.0 * p);
    CHECK(gdop(scaled, 10.0 * target, Dimensionality::TwoD) ==
          doctest::Approx(reference).epsilon(1e-9));

    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    auto rotate = [&](const Position& p) {
      return Position{p.x * std::cos(theta) - p.y * std::sin(theta),
                      p.x * std::sin(theta) + p.y * std::cos(theta), p.z};
    };
    std::vector<Position> rotated;
    for (const Position& p : anchors) rotated.push_back(rotate(p));
    CHECK(gdop(rotated, rotate(target), Dimensionality::TwoD) ==
          doctest::Approx(reference).epsilon(1e-9));
  }
}

TEST_CASE("scenario JSON round trip") {
  ScenarioConfig config;
  config.layout = HighwayDrop{3, 4.0, 500.0, 0.02};
  config.n_anchors = 4;
  config.seed = 77;
  const Scenario original = generate(config);
  const Scenario restored = scenario_from_json(scenario_to_json(original));
  CHECK(same_nodes(original.nodes, restored.nodes));
  CHECK(original.target_id == restored.target_id);
  CHECK(original.seed == restored.seed);
}

TEST_CASE("scenario JSON rejects duplicate ids and bad roles") {
  CHECK_THROWS_AS(
      scenario_from_json(R"({"nodes":[
        {"id":0,"role":"target-ue","x":0,"y":0,"z":0},
        {"id":0,"role":"anchor-ue","x":1,"y":0,"z":0}]})"),
      ConfigurationError);
  CHECK_THROWS_AS(
      scenario_from_json(R"({"nodes":[
        {"id":0,"role":"satellite","x":0,"y":0,"z":0}]})"),
      ConfigurationError);
}
