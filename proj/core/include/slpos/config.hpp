#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slpos/harness.hpp"

namespace slpos {

// A parsed experiment file: the base config plus the optional sweep block.
struct ExperimentFile {
  ExperimentConfig config;
  std::optional<SweepAxis> sweep_axis;
  std::vector<double> sweep_values;
};

// Strict parser: every key must be known, unknown keys are rejected with the
// full dotted path in the ConfigurationError message (no silent typo
// absorption). The schema is documented in the README.
ExperimentFile experiment_from_json(const std::string& text);

std::string experiment_to_json(const ExperimentFile& file);

// Applies "dotted.key=value" overrides to the raw JSON document before
// parsing. The key must already exist in the document; values are parsed as
// JSON scalars.
std::string apply_overrides(const std::string& text,
                            const std::vector<std::string>& overrides);

ExperimentFile load_experiment_file(const std::string& path,
                                    const std::vector<std::string>& overrides = {});

}  // namespace slpos
