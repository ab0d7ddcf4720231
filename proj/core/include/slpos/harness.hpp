#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slpos/channel.hpp"
#include "slpos/estimators.hpp"
#include "slpos/measurement.hpp"
#include "slpos/method.hpp"
#include "slpos/protocol.hpp"
#include "slpos/scenario.hpp"

namespace slpos {

struct ExperimentConfig {
  ScenarioConfig scenario;
  PositioningMethod method = PositioningMethod::Tdoa;
  RadioConfig radio;
  ChannelModel channel;
  SyncErrorModel sync = PerfectSync{};
  DriftModel drift = FixedDrift{0.0};
  int n_trials = 2000;
  std::uint64_t master_seed = 1;
  bool noise_enabled = true;
  double rtt_reply_s = 1e-3;
  double rtt_reply2_s = 1e-3;
  SessionKind session = SessionKind::Usl;
  DelayTable delays;
  std::vector<double> availability_thresholds_m = {0.5, 1.0, 1.5};
};

void validate(const ExperimentConfig& config);

struct TrialRecord {
  int trial_index = 0;
  Position true_position;
  PositionEstimate estimate;
  double horizontal_error_m = 0.0;
  double vertical_error_m = 0.0;
  double latency_s = 0.0;
  bool converged = false;
};

// Raw measurement row for CSV dumps: one line per synthesized measurement.
struct MeasurementRow {
  int trial = 0;
  PositioningMethod method = PositioningMethod::Tdoa;
  NodeId tx = 0;
  NodeId rx = 0;
  double value = 0.0;  // toa_s / est_range_m / diff_m / azimuth_rad
  double snr_db = 0.0;
  bool los = true;
};

// Empirical error distribution with nearest-rank percentiles:
// percentile(p) is the ceil(p*n)-th smallest value (1-based), p in (0, 1].
class CdfSummary {
 public:
  explicit CdfSummary(std::vector<double> values);

  double percentile(double p) const;
  // Fraction of values <= threshold; non-decreasing in the threshold.
  double availability(double threshold) const;
  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

struct RunSummary {
  std::optional<CdfSummary> horizontal;
  std::optional<CdfSummary> vertical;
  std::optional<CdfSummary> latency;
};

// Monte Carlo loop: trial i draws its streams from (master_seed, i), so the
// record list is identical for any worker count. Per-trial geometry errors
// are recorded as converged=false instead of aborting the run.
std::vector<TrialRecord> run(const ExperimentConfig& config, int n_workers = 1,
                             std::vector<MeasurementRow>* measurement_dump = nullptr);

RunSummary summarize(std::span<const TrialRecord> records);

enum class SweepAxis { BandwidthHz, NAnchors, SyncStdS, DriftMaxPpm, NAntennas };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(std::string_view name);

struct SweepRow {
  double value = 0.0;
  std::vector<TrialRecord> records;
  RunSummary summary;
};

// Applies one axis value to a copy of the base config. Throws
// ConfigurationError when the axis cannot drive the configured method
// (e.g. an antenna sweep on a pure time-based method).
ExperimentConfig apply_axis(const ExperimentConfig& base, SweepAxis axis,
                            double value);

// One full run per value, each with seeds derived from (master_seed, value
// index).
std::vector<SweepRow> sweep(const ExperimentConfig& base, SweepAxis axis,
                            std::span<const double> values, int n_workers = 1);

}  // namespace slpos
