#include "slpos/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "slpos/errors.hpp"

namespace slpos {

namespace {

using nlohmann::json;

// Wraps one JSON object for strict consumption: every key must be claimed by
// the schema, leftovers are reported with their full dotted path.
class StrictObject {
 public:
  StrictObject(const json& obj, std::string path)
      : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) {
      throw ConfigurationError("expected an object at " + path_);
    }
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json* claim(const std::string& key) {
    consumed_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) {
    const json* v = claim(key);
    if (!v) return fallback;
    try {
      return v->get<T>();
    } catch (const json::exception&) {
      throw ConfigurationError("bad value type for " + dotted(key));
    }
  }

  template <typename T>
  T require(const std::string& key) {
    const json* v = claim(key);
    if (!v) {
      throw ConfigurationError("missing required key " + dotted(key));
    }
    try {
      return v->get<T>();
    } catch (const json::exception&) {
      throw ConfigurationError("bad value type for " + dotted(key));
    }
  }

  std::string dotted(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!consumed_.count(key)) {
        throw ConfigurationError("unknown configuration key: " + dotted(key));
      }
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> consumed_;
};

Layout parse_layout(const json& node, const std::string& path) {
  StrictObject obj(node, path);
  const std::string kind = obj.require<std::string>("kind");
  Layout layout;
  if (kind == "highway") {
    HighwayDrop hw;
    hw.num_lanes = obj.get_or("num_lanes", hw.num_lanes);
    hw.lane_width_m = obj.get_or("lane_width_m", hw.lane_width_m);
    hw.segment_length_m = obj.get_or("segment_length_m", hw.segment_length_m);
    hw.vehicle_density_per_m =
        obj.get_or("vehicle_density_per_m", hw.vehicle_density_per_m);
    layout = hw;
  } else if (kind == "urban-grid") {
    UrbanGrid ug;
    ug.block_size_m = obj.get_or("block_size_m", ug.block_size_m);
    ug.road_width_m = obj.get_or("road_width_m", ug.road_width_m);
    ug.grid_extent_m = obj.get_or("grid_extent_m", ug.grid_extent_m);
    layout = ug;
  } else if (kind == "indoor-factory") {
    IndoorFactory inf;
    inf.hall_length_m = obj.get_or("hall_length_m", inf.hall_length_m);
    inf.hall_width_m = obj.get_or("hall_width_m", inf.hall_width_m);
    inf.clutter_density = obj.get_or("clutter_density", inf.clutter_density);
    layout = inf;
  } else if (kind == "custom") {
    const json* nodes = obj.claim("nodes");
    if (!nodes || !nodes->is_array()) {
      throw ConfigurationError("custom layout needs a nodes array at " + path);
    }
    CustomFixed custom;
    int index = 0;
    for (const auto& item : *nodes) {
      StrictObject node_obj(item, path + ".nodes[" + std::to_string(index) + "]");
      Node n;
      n.id = node_obj.require<NodeId>("id");
      const std::string role = node_obj.require<std::string>("role");
      if (role == "target-ue") n.role = NodeRole::TargetUe;
      else if (role == "anchor-ue") n.role = NodeRole::AnchorUe;
      else if (role == "rsu") n.role = NodeRole::Rsu;
      else if (role == "bs") n.role = NodeRole::Bs;
      else throw ConfigurationError("unknown node role: " + role);
      n.position.x = node_obj.require<double>("x");
      n.position.y = node_obj.require<double>("y");
      n.position.z = node_obj.get_or("z", 0.0);
      n.speed_mps = node_obj.get_or("speed_mps", 0.0);
      node_obj.finish();
      custom.nodes.push_back(n);
      ++index;
    }
    layout = custom;
  } else {
    throw ConfigurationError("unknown layout kind: " + kind);
  }
  obj.finish();
  return layout;
}

// Variant objects accept the parameter names of their sibling variants so a
// "kind" override does not strand the now-inapplicable keys; misspelled keys
// are still rejected.
SyncErrorModel parse_sync(const json& node, const std::string& path) {
  StrictObject obj(node, path);
  const std::string kind = obj.get_or<std::string>("kind", "perfect");
  TruncatedNormalSync tn;
  tn.mean_s = obj.get_or("mean_s", 0.0);
  tn.std_s = obj.get_or("std_s", 0.0);
  tn.lower_s = obj.get_or("lower_s", 0.0);
  tn.upper_s = obj.get_or("upper_s", 0.0);
  obj.finish();
  if (kind == "perfect") return PerfectSync{};
  if (kind == "truncated-normal") return tn;
  throw ConfigurationError("unknown sync kind: " + kind);
}

DriftModel parse_drift(const json& node, const std::string& path) {
  StrictObject obj(node, path);
  const std::string kind = obj.get_or<std::string>("kind", "fixed");
  const double ppm = obj.get_or("ppm", 0.0);
  const double max_abs_ppm = obj.get_or("max_abs_ppm", 0.0);
  obj.finish();
  if (kind == "fixed") return FixedDrift{ppm};
  if (kind == "uniform-symmetric") return UniformSymmetricDrift{max_abs_ppm};
  throw ConfigurationError("unknown drift kind: " + kind);
}

NlosExcessDelayModel parse_excess_delay(const json& node, const std::string& path) {
  StrictObject obj(node, path);
  const std::string kind = obj.get_or<std::string>("kind", "exponential");
  const double mean_s = obj.get_or("mean_s", 100e-9);
  const double bias_s = obj.get_or("bias_s", 100e-9);
  obj.finish();
  if (kind == "exponential") return ExponentialExcessDelay{mean_s};
  if (kind == "fixed") return FixedExcessDelay{bias_s};
  throw ConfigurationError("unknown nlos_excess_delay kind: " + kind);
}

const char* kDelayKeys[kMessageKindCount] = {
    "request",           "privacy-query",  "anchor-invite", "capability-info",
    "assistance-request", "assistance-data", "prs-exchange",  "result"};

}  // namespace

ExperimentFile experiment_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigurationError(std::string("config parse error: ") + err.what());
  }

  ExperimentFile file;
  ExperimentConfig& config = file.config;
  StrictObject root(doc, "");

  if (const json* scenario = root.claim("scenario")) {
    StrictObject obj(*scenario, "scenario");
    if (const json* layout = obj.claim("layout")) {
      config.scenario.layout = parse_layout(*layout, "scenario.layout");
    }
    config.scenario.n_anchors =
        obj.get_or("n_anchors", config.scenario.n_anchors);
    const std::string policy = obj.get_or<std::string>("anchor_policy", "nearest");
    if (policy == "nearest") config.scenario.anchor_policy = AnchorPolicy::Nearest;
    else if (policy == "random") config.scenario.anchor_policy = AnchorPolicy::Random;
    else if (policy == "best-gdop") config.scenario.anchor_policy = AnchorPolicy::BestGdop;
    else throw ConfigurationError("unknown anchor_policy: " + policy);
    const std::string dim = obj.get_or<std::string>("dimensionality", "2d");
    if (dim == "2d") config.scenario.dimensionality = Dimensionality::TwoD;
    else if (dim == "3d") config.scenario.dimensionality = Dimensionality::ThreeD;
    else throw ConfigurationError("unknown dimensionality: " + dim);
    config.scenario.seed = obj.get_or("seed", config.scenario.seed);
    obj.finish();
  }

  if (const json* method = root.claim("method")) {
    config.method = method_from_string(method->get<std::string>());
  }

  if (const json* radio = root.claim("radio")) {
    StrictObject obj(*radio, "radio");
    config.radio.bandwidth_hz = obj.get_or("bandwidth_hz", config.radio.bandwidth_hz);
    config.radio.carrier_hz = obj.get_or("carrier_hz", config.radio.carrier_hz);
    config.radio.tx_power_dbm = obj.get_or("tx_power_dbm", config.radio.tx_power_dbm);
    config.radio.noise_figure_db =
        obj.get_or("noise_figure_db", config.radio.noise_figure_db);
    config.radio.n_antennas = obj.get_or("n_antennas", config.radio.n_antennas);
    config.radio.antenna_spacing_wavelengths = obj.get_or(
        "antenna_spacing_wavelengths", config.radio.antenna_spacing_wavelengths);
    config.radio.planar_array = obj.get_or("planar_array", config.radio.planar_array);
    obj.finish();
  }

  if (const json* channel = root.claim("channel")) {
    StrictObject obj(*channel, "channel");
    config.channel.reference_loss_db =
        obj.get_or("reference_loss_db", config.channel.reference_loss_db);
    config.channel.pathloss_exponent =
        obj.get_or("pathloss_exponent", config.channel.pathloss_exponent);
    config.channel.pathloss_exponent_nlos =
        obj.get_or("pathloss_exponent_nlos", config.channel.pathloss_exponent_nlos);
    config.channel.shadowing_std_db =
        obj.get_or("shadowing_std_db", config.channel.shadowing_std_db);
    config.channel.los_decay_m = obj.get_or("los_decay_m", config.channel.los_decay_m);
    if (const json* excess = obj.claim("nlos_excess_delay")) {
      config.channel.nlos_excess_delay =
          parse_excess_delay(*excess, "channel.nlos_excess_delay");
    }
    config.channel.aoa_nlos_scatter_prob =
        obj.get_or("aoa_nlos_scatter_prob", config.channel.aoa_nlos_scatter_prob);
    obj.finish();
  }

  if (const json* sync = root.claim("sync")) {
    config.sync = parse_sync(*sync, "sync");
  }
  if (const json* drift = root.claim("drift")) {
    config.drift = parse_drift(*drift, "drift");
  }

  config.n_trials = root.get_or("n_trials", config.n_trials);
  config.master_seed = root.get_or("master_seed", config.master_seed);
  config.noise_enabled = root.get_or("noise_enabled", config.noise_enabled);
  config.rtt_reply_s = root.get_or("rtt_reply_s", config.rtt_reply_s);
  config.rtt_reply2_s = root.get_or("rtt_reply2_s", config.rtt_reply2_s);
  if (const json* session = root.claim("session")) {
    config.session = session_kind_from_string(session->get<std::string>());
  }

  if (const json* delays = root.claim("protocol_delays")) {
    StrictObject obj(*delays, "protocol_delays");
    for (int i = 0; i < kMessageKindCount; ++i) {
      config.delays.per_message_s[i] =
          obj.get_or(kDelayKeys[i], config.delays.per_message_s[i]);
    }
    config.delays.stage_processing_s =
        obj.get_or("stage_processing_s", config.delays.stage_processing_s);
    obj.finish();
  }

  if (const json* thresholds = root.claim("availability_thresholds_m")) {
    if (!thresholds->is_array()) {
      throw ConfigurationError("availability_thresholds_m must be an array");
    }
    config.availability_thresholds_m = thresholds->get<std::vector<double>>();
  }

  if (const json* sweep = root.claim("sweep")) {
    StrictObject obj(*sweep, "sweep");
    file.sweep_axis = sweep_axis_from_string(obj.require<std::string>("axis"));
    file.sweep_values = obj.require<std::vector<double>>("values");
    obj.finish();
    if (file.sweep_values.empty()) {
      throw ConfigurationError("sweep.values must not be empty");
    }
  }

  root.finish();
  validate(config);
  return file;
}

std::string experiment_to_json(const ExperimentFile& file) {
  const ExperimentConfig& config = file.config;
  json doc;

  json layout;
  if (const auto* hw = std::get_if<HighwayDrop>(&config.scenario.layout)) {
    layout = {{"kind", "highway"},
              {"num_lanes", hw->num_lanes},
              {"lane_width_m", hw->lane_width_m},
              {"segment_length_m", hw->segment_length_m},
              {"vehicle_density_per_m", hw->vehicle_density_per_m}};
  } else if (const auto* ug = std::get_if<UrbanGrid>(&config.scenario.layout)) {
    layout = {{"kind", "urban-grid"},
              {"block_size_m", ug->block_size_m},
              {"road_width_m", ug->road_width_m},
              {"grid_extent_m", ug->grid_extent_m}};
  } else if (const auto* inf = std::get_if<IndoorFactory>(&config.scenario.layout)) {
    layout = {{"kind", "indoor-factory"},
              {"hall_length_m", inf->hall_length_m},
              {"hall_width_m", inf->hall_width_m},
              {"clutter_density", inf->clutter_density}};
  } else {
    const auto& custom = std::get<CustomFixed>(config.scenario.layout);
    layout["kind"] = "custom";
    layout["nodes"] = json::array();
    for (const Node& n : custom.nodes) {
      const char* role = n.role == NodeRole::TargetUe   ? "target-ue"
                         : n.role == NodeRole::AnchorUe ? "anchor-ue"
                         : n.role == NodeRole::Rsu      ? "rsu"
                                                        : "bs";
      layout["nodes"].push_back({{"id", n.id},
                                 {"role", role},
                                 {"x", n.position.x},
                                 {"y", n.position.y},
                                 {"z", n.position.z},
                                 {"speed_mps", n.speed_mps}});
    }
  }

  doc["scenario"] = {
      {"layout", layout},
      {"n_anchors", config.scenario.n_anchors},
      {"anchor_policy",
       config.scenario.anchor_policy == AnchorPolicy::Nearest   ? "nearest"
       : config.scenario.anchor_policy == AnchorPolicy::Random ? "random"
                                                                : "best-gdop"},
      {"dimensionality",
       config.scenario.dimensionality == Dimensionality::TwoD ? "2d" : "3d"},
      {"seed", config.scenario.seed},
  };
  doc["method"] = to_string(config.method);
  doc["radio"] = {
      {"bandwidth_hz", config.radio.bandwidth_hz},
      {"carrier_hz", config.radio.carrier_hz},
      {"tx_power_dbm", config.radio.tx_power_dbm},
      {"noise_figure_db", config.radio.noise_figure_db},
      {"n_antennas", config.radio.n_antennas},
      {"antenna_spacing_wavelengths", config.radio.antenna_spacing_wavelengths},
      {"planar_array", config.radio.planar_array},
  };
  json excess;
  if (const auto* exp =
          std::get_if<ExponentialExcessDelay>(&config.channel.nlos_excess_delay)) {
    excess = {{"kind", "exponential"}, {"mean_s", exp->mean_s}};
  } else {
    excess = {{"kind", "fixed"},
              {"bias_s", std::get<FixedExcessDelay>(config.channel.nlos_excess_delay).bias_s}};
  }
  doc["channel"] = {
      {"reference_loss_db", config.channel.reference_loss_db},
      {"pathloss_exponent", config.channel.pathloss_exponent},
      {"pathloss_exponent_nlos", config.channel.pathloss_exponent_nlos},
      {"shadowing_std_db", config.channel.shadowing_std_db},
      {"los_decay_m", config.channel.los_decay_m},
      {"nlos_excess_delay", excess},
      {"aoa_nlos_scatter_prob", config.channel.aoa_nlos_scatter_prob},
  };
  if (const auto* tn = std::get_if<TruncatedNormalSync>(&config.sync)) {
    doc["sync"] = {{"kind", "truncated-normal"},
                   {"mean_s", tn->mean_s},
                   {"std_s", tn->std_s},
                   {"lower_s", tn->lower_s},
                   {"upper_s", tn->upper_s}};
  } else {
    doc["sync"] = {{"kind", "perfect"}};
  }
  if (const auto* fixed = std::get_if<FixedDrift>(&config.drift)) {
    doc["drift"] = {{"kind", "fixed"}, {"ppm", fixed->ppm}};
  } else {
    doc["drift"] = {{"kind", "uniform-symmetric"},
                    {"max_abs_ppm",
                     std::get<UniformSymmetricDrift>(config.drift).max_abs_ppm}};
  }
  doc["n_trials"] = config.n_trials;
  doc["master_seed"] = config.master_seed;
  doc["noise_enabled"] = config.noise_enabled;
  doc["rtt_reply_s"] = config.rtt_reply_s;
  doc["rtt_reply2_s"] = config.rtt_reply2_s;
  doc["session"] = to_string(config.session);
  json delays;
  for (int i = 0; i < kMessageKindCount; ++i) {
    delays[kDelayKeys[i]] = config.delays.per_message_s[i];
  }
  delays["stage_processing_s"] = config.delays.stage_processing_s;
  doc["protocol_delays"] = delays;
  doc["availability_thresholds_m"] = config.availability_thresholds_m;
  if (file.sweep_axis) {
    doc["sweep"] = {{"axis", to_string(*file.sweep_axis)},
                    {"values", file.sweep_values}};
  }
  return doc.dump(2);
}

std::string apply_overrides(const std::string& text,
                            const std::vector<std::string>& overrides) {
  if (overrides.empty()) return text;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigurationError(std::string("config parse error: ") + err.what());
  }
  for (const std::string& override_spec : overrides) {
    const auto eq = override_spec.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("override must look like dotted.key=value: " + override_spec);
    }
    const std::string path = override_spec.substr(0, eq);
    const std::string raw_value = override_spec.substr(eq + 1);

    // Navigate to the parent object; every path segment must already exist.
    json* node = &doc;
    std::istringstream segments(path);
    std::string segment;
    std::vector<std::string> parts;
    while (std::getline(segments, segment, '.')) parts.push_back(segment);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      if (!node->is_object() || !node->contains(parts[i])) {
        throw ConfigurationError("override references unknown key: " + path);
      }
      node = &(*node)[parts[i]];
    }
    if (!node->is_object() || !node->contains(parts.back())) {
      throw ConfigurationError("override references unknown key: " + path);
    }

    json value;
    try {
      value = json::parse(raw_value);
    } catch (const json::parse_error&) {
      value = raw_value;  // unquoted strings (method names, kinds, ...)
    }
    (*node)[parts.back()] = value;
  }
  return doc.dump();
}

ExperimentFile load_experiment_file(const std::string& path,
                                    const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot open config file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return experiment_from_json(apply_overrides(buffer.str(), overrides));
}

}  // namespace slpos
