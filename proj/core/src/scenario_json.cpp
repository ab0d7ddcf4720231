#include <json.hpp>

#include "slpos/errors.hpp"
#include "slpos/scenario.hpp"

namespace slpos {

namespace {

std::string role_name(NodeRole role) {
  switch (role) {
    case NodeRole::TargetUe: return "target-ue";
    case NodeRole::AnchorUe: return "anchor-ue";
    case NodeRole::Rsu: return "rsu";
    case NodeRole::Bs: return "bs";
  }
  throw UsageError("unknown node role");
}

NodeRole role_from_name(const std::string& name) {
  if (name == "target-ue") return NodeRole::TargetUe;
  if (name == "anchor-ue") return NodeRole::AnchorUe;
  if (name == "rsu") return NodeRole::Rsu;
  if (name == "bs") return NodeRole::Bs;
  throw ConfigurationError("unknown node role: " + name);
}

}  // namespace

std::string scenario_to_json(const Scenario& scenario) {
  nlohmann::json doc;
  doc["seed"] = scenario.seed;
  doc["target_id"] = scenario.target_id;
  doc["dimensionality"] =
      scenario.dimensionality == Dimensionality::TwoD ? "2d" : "3d";
  doc["nodes"] = nlohmann::json::array();
  for (const Node& node : scenario.nodes) {
    doc["nodes"].push_back({{"id", node.id},
                            {"role", role_name(node.role)},
                            {"x", node.position.x},
                            {"y", node.position.y},
                            {"z", node.position.z},
                            {"speed_mps", node.speed_mps}});
  }
  return doc.dump(2);
}

Scenario scenario_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ConfigurationError(std::string("scenario JSON parse error: ") + err.what());
  }
  Scenario scenario;
  scenario.seed = doc.value("seed", std::uint64_t{0});
  scenario.dimensionality = doc.value("dimensionality", std::string("2d")) == "3d"
                                ? Dimensionality::ThreeD
                                : Dimensionality::TwoD;
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw ConfigurationError("scenario JSON needs a nodes array");
  }
  for (const auto& item : doc["nodes"]) {
    Node node;
    node.id = item.at("id").get<NodeId>();
    node.role = role_from_name(item.at("role").get<std::string>());
    node.position = {item.at("x").get<double>(), item.at("y").get<double>(),
                     item.at("z").get<double>()};
    node.speed_mps = item.value("speed_mps", 0.0);
    scenario.nodes.push_back(node);
    if (node.role == NodeRole::TargetUe) scenario.target_id = node.id;
  }
  if (doc.contains("target_id")) {
    scenario.target_id = doc["target_id"].get<NodeId>();
  }
  // Reuse the custom-layout validation for id uniqueness and finiteness.
  validate(ScenarioConfig{CustomFixed{scenario.nodes}, 1, AnchorPolicy::Nearest,
                          scenario.dimensionality, scenario.seed});
  return scenario;
}

}  // namespace slpos
