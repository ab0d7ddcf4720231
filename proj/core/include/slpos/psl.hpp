#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slpos/harness.hpp"

namespace slpos {

// One positioning service level: accuracy thresholds that must be met at the
// stated availability, plus an optional latency bound checked at the same
// percentile. PSL 7 is the relative-positioning row.
struct PslRequirement {
  std::string name;
  double horizontal_m = 1.0;
  std::optional<double> vertical_m;
  double availability_frac = 0.95;  // in (0, 1]
  std::optional<double> latency_s;
  bool relative = false;
  std::string mobility_class;  // MIxx / MDxx / MOxx / MTxx label
};

void validate(const PslRequirement& psl);

struct PslClause {
  std::string name;      // "horizontal", "vertical", "latency"
  double required = 0.0;
  double achieved = 0.0;
  double margin = 0.0;  // positive = clause met with room to spare
  bool pass = false;
};

struct PslReport {
  std::string psl_name;
  bool pass = false;
  std::vector<PslClause> clauses;
};

// Pass iff availability(horizontal_m) >= availability_frac, same for the
// vertical threshold when present, and the latency percentile at
// availability_frac stays within latency_s when present. Comparisons are
// inclusive. Throws UsageError when the summary lacks a dimension the PSL
// requires.
PslReport evaluate_psl(const RunSummary& summary, const PslRequirement& psl);

// Rel-19 service levels. Quoted boundary values are filled in; cells the
// public material leaves open carry documented placeholder values and are
// meant to be overridden from a JSON table.
std::vector<PslRequirement> default_psl_table();

// The Rel-18 V2X benchmark: 0.5 m horizontal at 90 % availability.
PslRequirement v2x_rel18_benchmark();

std::vector<PslRequirement> psl_table_from_json(const std::string& text);
std::string psl_table_to_json(const std::vector<PslRequirement>& table);

}  // namespace slpos
