#include "slpos/clock.hpp"

#include <cmath>

#include "slpos/errors.hpp"

namespace slpos {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

void validate(const SyncErrorModel& sync) {
  if (const auto* tn = std::get_if<TruncatedNormalSync>(&sync)) {
    if (!(tn->std_s >= 0.0)) {
      throw ConfigurationError("sync std_s must be >= 0");
    }
    if (!(tn->lower_s < tn->upper_s)) {
      throw ConfigurationError("sync lower_s must be < upper_s");
    }
    if (!(tn->lower_s <= tn->mean_s && tn->mean_s <= tn->upper_s)) {
      throw ConfigurationError("sync mean_s must lie within [lower_s, upper_s]");
    }
  }
}

void validate(const DriftModel& drift) {
  if (const auto* fixed = std::get_if<FixedDrift>(&drift)) {
    if (!(std::abs(fixed->ppm) <= kMaxAbsDriftPpm)) {
      throw ConfigurationError("fixed drift exceeds the sanity bound of 100 ppm");
    }
  } else {
    const auto& uniform = std::get<UniformSymmetricDrift>(drift);
    if (!(uniform.max_abs_ppm >= 0.0)) {
      throw ConfigurationError("max_abs_ppm must be >= 0");
    }
    if (!(uniform.max_abs_ppm <= kMaxAbsDriftPpm)) {
      throw ConfigurationError("max_abs_ppm exceeds the sanity bound of 100 ppm");
    }
  }
}

double sample_truncated_normal(const TruncatedNormalSync& model, RngStream& rng) {
  if (model.std_s == 0.0) {
    return model.mean_s;  // degenerate: all mass at the (in-bounds) mean
  }
  const double zl = (model.lower_s - model.mean_s) / model.std_s;
  const double zu = (model.upper_s - model.mean_s) / model.std_s;
  const double acceptance = normal_cdf(zu) - normal_cdf(zl);
  if (acceptance < 1e-6) {
    throw ModelError(
        "truncation interval carries negligible mass under the parent normal");
  }
  for (;;) {
    const double draw = rng.normal(model.mean_s, model.std_s);
    if (draw >= model.lower_s && draw <= model.upper_s) {
      return draw;
    }
  }
}

ClockState sample_clock(const SyncErrorModel& sync, const DriftModel& drift,
                        RngStream& rng) {
  ClockState state;
  if (const auto* tn = std::get_if<TruncatedNormalSync>(&sync)) {
    state.offset_s = sample_truncated_normal(*tn, rng);
  }
  if (const auto* fixed = std::get_if<FixedDrift>(&drift)) {
    state.drift_ppm = fixed->ppm;
  } else {
    const auto& uniform = std::get<UniformSymmetricDrift>(drift);
    state.drift_ppm = rng.uniform(-uniform.max_abs_ppm, uniform.max_abs_ppm);
  }
  return state;
}

}  // namespace slpos
