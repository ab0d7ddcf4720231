#include "slpos/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "slpos/errors.hpp"

namespace slpos {

namespace {

constexpr std::uint64_t kScenarioTag = 1;
constexpr std::uint64_t kClockTag = 2;
constexpr std::uint64_t kLinkTag = 3;
constexpr std::uint64_t kMeasureTag = 4;
constexpr std::uint64_t kSweepTag = 0x53;

struct TrialContext {
  const ExperimentConfig& config;
  std::vector<MeasurementRow>* dump;
};

void dump_row(TrialContext& ctx, int trial, NodeId tx, NodeId rx, double value,
              double snr_db, bool los) {
  if (ctx.dump) {
    ctx.dump->push_back({trial, ctx.config.method, tx, rx, value, snr_db, los});
  }
}

TrialRecord run_trial(TrialContext& ctx, int trial_index) {
  const ExperimentConfig& cfg = ctx.config;

  ScenarioConfig scenario_cfg = cfg.scenario;
  scenario_cfg.seed = derive_seed(cfg.master_seed, trial_index, kScenarioTag);
  Scenario scenario = generate(scenario_cfg);

  const std::vector<NodeId> anchor_ids = select_anchors(
      scenario, scenario.target_id, cfg.scenario.n_anchors,
      cfg.scenario.anchor_policy);

  // Clocks for the participating nodes, assigned in id order so the draw
  // sequence is independent of the selection policy's output order.
  RngStream clock_rng(derive_seed(cfg.master_seed, trial_index, kClockTag));
  std::vector<NodeId> clocked = anchor_ids;
  clocked.push_back(scenario.target_id);
  std::sort(clocked.begin(), clocked.end());
  for (NodeId id : clocked) {
    for (Node& node : scenario.nodes) {
      if (node.id == id) {
        node.clock = sample_clock(cfg.sync, cfg.drift, clock_rng);
      }
    }
  }

  const Node& target = node_by_id(scenario, scenario.target_id);
  std::vector<Node> anchors;
  anchors.reserve(anchor_ids.size());
  for (NodeId id : anchor_ids) anchors.push_back(node_by_id(scenario, id));

  RngStream link_rng(derive_seed(cfg.master_seed, trial_index, kLinkTag));
  std::vector<LinkState> links;
  links.reserve(anchors.size());
  for (const Node& anchor : anchors) {
    links.push_back(draw_link(anchor, target, cfg.channel, cfg.radio, link_rng));
  }

  RngStream meas_rng(derive_seed(cfg.master_seed, trial_index, kMeasureTag));
  const Measurer measurer(cfg.radio, cfg.noise_enabled,
                          cfg.channel.aoa_nlos_scatter_prob);

  SolverSettings settings;
  settings.dimensionality = cfg.scenario.dimensionality;

  PositionEstimate estimate;
  auto fallback_position = [&]() {
    Position c;
    for (const Node& anchor : anchors) c = c + anchor.position;
    const double n = static_cast<double>(anchors.size());
    return Position{c.x / n, c.y / n, c.z / n};
  };

  try {
    switch (cfg.method) {
      case PositioningMethod::ToaMultilat: {
        std::vector<RangeObservation> ranges;
        for (std::size_t i = 0; i < anchors.size(); ++i) {
          const ToaMeasurement toa =
              measurer.measure_toa(anchors[i], target, links[i], meas_rng);
          dump_row(ctx, trial_index, toa.tx_id, toa.rx_id, toa.toa_s,
                   toa.snr_db, toa.los);
          ranges.push_back({anchors[i].position, kSpeedOfLight * toa.toa_s});
        }
        estimate = solve_range_multilateration(ranges, settings);
        break;
      }
      case PositioningMethod::RttSingle:
      case PositioningMethod::RttDouble: {
        std::vector<RangeObservation> ranges;
        for (std::size_t i = 0; i < anchors.size(); ++i) {
          const RttMeasurement rtt =
              cfg.method == PositioningMethod::RttSingle
                  ? measurer.rtt_single(target, anchors[i], cfg.rtt_reply_s,
                                        links[i], meas_rng)
                  : measurer.rtt_double(target, anchors[i], cfg.rtt_reply_s,
                                        cfg.rtt_reply2_s, links[i], meas_rng);
          dump_row(ctx, trial_index, rtt.a_id, rtt.b_id, rtt.est_range_m,
                   rtt.snr_db, rtt.los);
          ranges.push_back({anchors[i].position, rtt.est_range_m});
        }
        estimate = solve_range_multilateration(ranges, settings);
        break;
      }
      case PositioningMethod::Tdoa: {
        const TdoaSet set = measurer.tdoa_set(target, anchors, links, meas_rng);
        std::vector<AnchorSite> sites;
        for (const Node& anchor : anchors) {
          sites.push_back({anchor.id, anchor.position});
        }
        for (const TdoaDiff& diff : set.diffs) {
          dump_row(ctx, trial_index, diff.anchor_id, set.target_id, diff.diff_m,
                   0.0, true);
        }
        estimate = solve_tdoa(set, sites, settings);
        break;
      }
      case PositioningMethod::AoaTriangulation: {
        std::vector<BearingObservation> bearings;
        for (std::size_t i = 0; i < anchors.size(); ++i) {
          const AoaMeasurement aoa =
              measurer.measure_aoa(anchors[i], target, links[i], meas_rng);
          dump_row(ctx, trial_index, aoa.source_id, aoa.observer_id,
                   aoa.azimuth_rad, links[i].snr_db, links[i].los);
          bearings.push_back({anchors[i].position, aoa.azimuth_rad,
                              aoa.zenith_rad, aoa.std_rad});
        }
        estimate = solve_aoa_triangulation(bearings, settings);
        break;
      }
      case PositioningMethod::HybridRttAoa: {
        // Rides on the nearest selected anchor.
        std::size_t nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < anchors.size(); ++i) {
          const double d = distance(anchors[i].position, target.position);
          if (d < best) {
            best = d;
            nearest = i;
          }
        }
        const RttMeasurement rtt =
            measurer.rtt_double(target, anchors[nearest], cfg.rtt_reply_s,
                                cfg.rtt_reply2_s, links[nearest], meas_rng);
        const AoaMeasurement aoa = measurer.measure_aoa(
            anchors[nearest], target, links[nearest], meas_rng);
        dump_row(ctx, trial_index, rtt.a_id, rtt.b_id, rtt.est_range_m,
                 rtt.snr_db, rtt.los);
        dump_row(ctx, trial_index, aoa.source_id, aoa.observer_id,
                 aoa.azimuth_rad, links[nearest].snr_db, links[nearest].los);
        estimate = solve_hybrid_rtt_aoa(rtt, aoa, anchors[nearest]);
        break;
      }
    }
  } catch (const GeometryError&) {
    estimate = PositionEstimate{};
    estimate.position = fallback_position();
    estimate.converged = false;
  }

  TrialRecord record;
  record.trial_index = trial_index;
  record.true_position = target.position;
  record.estimate = estimate;
  record.horizontal_error_m =
      horizontal_distance(estimate.position, target.position);
  record.vertical_error_m = std::abs(estimate.position.z - target.position.z);

  Session session = run_happy_path(
      cfg.session,
      {cfg.method, static_cast<int>(anchors.size())}, cfg.delays);
  record.latency_s = session_latency_s(session);
  record.converged = estimate.converged;
  return record;
}

}  // namespace

void validate(const ExperimentConfig& config) {
  validate(config.scenario);
  validate(config.radio);
  validate(config.channel);
  validate(config.sync);
  validate(config.drift);
  if (config.n_trials < 1) {
    throw ConfigurationError("n_trials must be >= 1");
  }
  if (!(config.rtt_reply_s > 0.0) || !(config.rtt_reply2_s > 0.0)) {
    throw ConfigurationError("rtt reply times must be > 0");
  }
  const bool three_d = config.scenario.dimensionality == Dimensionality::ThreeD;
  const int needed = min_anchors(config.method, three_d);
  if (config.scenario.n_anchors < needed) {
    throw ConfigurationError("method " + to_string(config.method) +
                             " needs at least " + std::to_string(needed) +
                             " anchors");
  }
  if ((config.method == PositioningMethod::AoaTriangulation ||
       config.method == PositioningMethod::HybridRttAoa) &&
      config.radio.n_antennas < 2) {
    throw ConfigurationError("angle-based methods need n_antennas >= 2");
  }
}

std::vector<TrialRecord> run(const ExperimentConfig& config, int n_workers,
                             std::vector<MeasurementRow>* measurement_dump) {
  validate(config);
  if (n_workers < 1) {
    throw ConfigurationError("worker count must be >= 1");
  }

  std::vector<TrialRecord> records(config.n_trials);

  if (n_workers == 1 || config.n_trials == 1) {
    TrialContext ctx{config, measurement_dump};
    for (int i = 0; i < config.n_trials; ++i) {
      records[i] = run_trial(ctx, i);
    }
    return records;
  }

  // Per-trial streams make the records independent of the work split; the
  // measurement dump is collected per worker and re-stitched in trial order.
  const int workers = std::min(n_workers, config.n_trials);
  std::vector<std::vector<MeasurementRow>> dumps(
      measurement_dump ? workers : 0);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      TrialContext ctx{config, measurement_dump ? &dumps[w] : nullptr};
      for (int i = w; i < config.n_trials; i += workers) {
        records[i] = run_trial(ctx, i);
      }
    });
  }
  for (std::thread& thread : pool) thread.join();

  if (measurement_dump) {
    std::vector<MeasurementRow> merged;
    for (const auto& dump : dumps) {
      merged.insert(merged.end(), dump.begin(), dump.end());
    }
    std::stable_sort(merged.begin(), merged.end(),
                     [](const MeasurementRow& a, const MeasurementRow& b) {
                       return a.trial < b.trial;
                     });
    measurement_dump->insert(measurement_dump->end(), merged.begin(),
                             merged.end());
  }
  return records;
}

CdfSummary::CdfSummary(std::vector<double> values) : sorted_(std::move(values)) {
  if (sorted_.empty()) {
    throw UsageError("cannot summarize an empty sample");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double CdfSummary::percentile(double p) const {
  if (!(p > 0.0 && p <= 1.0)) {
    throw UsageError("percentile p must be in (0, 1]");
  }
  const auto n = static_cast<double>(sorted_.size());
  const auto rank = static_cast<std::size_t>(std::ceil(p * n));
  return sorted_[std::max<std::size_t>(rank, 1) - 1];
}

double CdfSummary::availability(double threshold) const {
  const auto it =
      std::upper_bound(sorted_.begin(), sorted_.end(), threshold);
  return static_cast<double>(it - sorted_.begin()) /
         static_cast<double>(sorted_.size());
}

RunSummary summarize(std::span<const TrialRecord> records) {
  if (records.empty()) {
    throw UsageError("cannot summarize an empty run");
  }
  std::vector<double> horizontal, vertical, latency;
  horizontal.reserve(records.size());
  vertical.reserve(records.size());
  latency.reserve(records.size());
  for (const TrialRecord& record : records) {
    horizontal.push_back(record.horizontal_error_m);
    vertical.push_back(record.vertical_error_m);
    latency.push_back(record.latency_s);
  }
  RunSummary summary;
  summary.horizontal.emplace(std::move(horizontal));
  summary.vertical.emplace(std::move(vertical));
  summary.latency.emplace(std::move(latency));
  return summary;
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::BandwidthHz: return "bandwidth_hz";
    case SweepAxis::NAnchors: return "n_anchors";
    case SweepAxis::SyncStdS: return "sync_std_s";
    case SweepAxis::DriftMaxPpm: return "drift_max_ppm";
    case SweepAxis::NAntennas: return "n_antennas";
  }
  throw UsageError("unknown sweep axis");
}

SweepAxis sweep_axis_from_string(std::string_view name) {
  if (name == "bandwidth_hz") return SweepAxis::BandwidthHz;
  if (name == "n_anchors") return SweepAxis::NAnchors;
  if (name == "sync_std_s") return SweepAxis::SyncStdS;
  if (name == "drift_max_ppm") return SweepAxis::DriftMaxPpm;
  if (name == "n_antennas") return SweepAxis::NAntennas;
  throw ConfigurationError("unknown sweep axis: " + std::string(name));
}

ExperimentConfig apply_axis(const ExperimentConfig& base, SweepAxis axis,
                            double value) {
  ExperimentConfig config = base;
  const PositioningMethod m = base.method;
  switch (axis) {
    case SweepAxis::BandwidthHz:
      config.radio.bandwidth_hz = value;
      break;
    case SweepAxis::NAnchors:
      if (m == PositioningMethod::HybridRttAoa) {
        throw ConfigurationError(
            "n_anchors sweep is incompatible with the single-anchor hybrid method");
      }
      config.scenario.n_anchors = static_cast<int>(value);
      break;
    case SweepAxis::SyncStdS:
      if (m != PositioningMethod::ToaMultilat && m != PositioningMethod::Tdoa) {
        throw ConfigurationError(
            "sync_std_s sweep only drives the sync-sensitive methods (toa, tdoa)");
      }
      if (value <= 0.0) {
        config.sync = PerfectSync{};
      } else {
        config.sync = TruncatedNormalSync{0.0, value, -3.0 * value, 3.0 * value};
      }
      break;
    case SweepAxis::DriftMaxPpm:
      if (m != PositioningMethod::RttSingle && m != PositioningMethod::RttDouble &&
          m != PositioningMethod::HybridRttAoa) {
        throw ConfigurationError(
            "drift_max_ppm sweep only drives the RTT-based methods");
      }
      config.drift = UniformSymmetricDrift{value};
      break;
    case SweepAxis::NAntennas:
      if (m != PositioningMethod::AoaTriangulation &&
          m != PositioningMethod::HybridRttAoa) {
        throw ConfigurationError(
            "n_antennas sweep only drives the angle-based methods");
      }
      config.radio.n_antennas = static_cast<int>(value);
      break;
  }
  return config;
}

std::vector<SweepRow> sweep(const ExperimentConfig& base, SweepAxis axis,
                            std::span<const double> values, int n_workers) {
  if (values.empty()) {
    throw UsageError("sweep needs at least one value");
  }
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    ExperimentConfig config = apply_axis(base, axis, values[i]);
    config.master_seed = derive_seed(base.master_seed, kSweepTag, i);
    SweepRow row;
    row.value = values[i];
    row.records = run(config, n_workers);
    row.summary = summarize(row.records);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace slpos
