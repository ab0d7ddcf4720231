#pragma once

#include <variant>

#include "slpos/rng.hpp"

namespace slpos {

// Sanity bound on oscillator drift. Consumer-grade TCXOs sit well below this.
inline constexpr double kMaxAbsDriftPpm = 100.0;

// Per-node clock imperfections. The offset shifts timestamp epochs, the
// drift scales measured durations.
struct ClockState {
  double offset_s = 0.0;
  double drift_ppm = 0.0;
};

struct PerfectSync {};

// Truncated normal inter-node synchronization error, sampled by rejection so
// draws are exactly bounded.
struct TruncatedNormalSync {
  double mean_s = 0.0;
  double std_s = 0.0;
  double lower_s = 0.0;
  double upper_s = 0.0;
};

using SyncErrorModel = std::variant<PerfectSync, TruncatedNormalSync>;

struct FixedDrift {
  double ppm = 0.0;
};

struct UniformSymmetricDrift {
  double max_abs_ppm = 0.0;
};

using DriftModel = std::variant<FixedDrift, UniformSymmetricDrift>;

void validate(const SyncErrorModel& sync);
void validate(const DriftModel& drift);

// Throws ModelError when the truncation interval carries negligible mass
// (acceptance probability < 1e-6) under the parent normal.
double sample_truncated_normal(const TruncatedNormalSync& model, RngStream& rng);

// Draws a clock state: offset from the sync model (Perfect -> 0), drift from
// the drift model.
ClockState sample_clock(const SyncErrorModel& sync, const DriftModel& drift,
                        RngStream& rng);

// Duration as measured by a drifting local oscillator. Offsets shift epochs,
// not durations, so only drift enters here.
inline double local_duration(double true_duration_s, const ClockState& clock) {
  return true_duration_s * (1.0 + clock.drift_ppm * 1e-6);
}

}  // namespace slpos
