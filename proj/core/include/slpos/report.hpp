#pragma once

#include <string>
#include <vector>

#include "slpos/harness.hpp"
#include "slpos/psl.hpp"

namespace slpos {

// Results CSV, one row per trial:
// trial,method,bandwidth_hz,n_anchors,h_err_m,v_err_m,latency_s,converged
// Formatting is fixed so identical records serialize to identical bytes.
// The axis, when present, tells which column varies across sweep rows.
std::string results_csv(const std::vector<SweepRow>& rows,
                        const ExperimentConfig& config,
                        std::optional<SweepAxis> axis = std::nullopt);

std::string measurements_csv(const std::vector<MeasurementRow>& rows);

// Summary JSON: per sweep value the p50/p67/p90/p95/p99 percentiles,
// availability at the configured thresholds, latency percentiles, and the
// PSL verdicts.
std::string summary_json(const std::vector<SweepRow>& rows,
                         const ExperimentConfig& config,
                         std::optional<SweepAxis> axis,
                         const std::vector<PslRequirement>& psl_table);

// Parses a results CSV back into records (used by psl-check).
std::vector<TrialRecord> records_from_results_csv(const std::string& text);

// One-screen human summary printed by the CLI.
std::string text_summary(const std::vector<SweepRow>& rows,
                         const ExperimentConfig& config,
                         std::optional<SweepAxis> axis,
                         const std::vector<PslRequirement>& psl_table);

}  // namespace slpos
