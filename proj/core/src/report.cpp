#include "slpos/report.hpp"

#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "slpos/errors.hpp"

namespace slpos {

namespace {

// Fixed formatting so equal records always serialize to equal bytes.
std::string fmt(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

ExperimentConfig effective_config(const ExperimentConfig& config,
                                  std::optional<SweepAxis> axis, double value) {
  return axis ? apply_axis(config, *axis, value) : config;
}

nlohmann::json percentile_block(const CdfSummary& cdf) {
  return {{"p50", cdf.percentile(0.50)}, {"p67", cdf.percentile(0.67)},
          {"p90", cdf.percentile(0.90)}, {"p95", cdf.percentile(0.95)},
          {"p99", cdf.percentile(0.99)}};
}

}  // namespace

std::string results_csv(const std::vector<SweepRow>& rows,
                        const ExperimentConfig& config,
                        std::optional<SweepAxis> axis) {
  std::ostringstream out;
  out << "trial,method,bandwidth_hz,n_anchors,h_err_m,v_err_m,latency_s,converged\n";
  for (const SweepRow& row : rows) {
    const ExperimentConfig eff = effective_config(config, axis, row.value);
    for (const TrialRecord& record : row.records) {
      out << record.trial_index << ',' << to_string(eff.method) << ','
          << fmt(eff.radio.bandwidth_hz) << ',' << eff.scenario.n_anchors << ','
          << fmt(record.horizontal_error_m) << ','
          << fmt(record.vertical_error_m) << ',' << fmt(record.latency_s) << ','
          << (record.converged ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

std::string measurements_csv(const std::vector<MeasurementRow>& rows) {
  std::ostringstream out;
  out << "trial,method,tx,rx,value,snr_db,los\n";
  for (const MeasurementRow& row : rows) {
    out << row.trial << ',' << to_string(row.method) << ',' << row.tx << ','
        << row.rx << ',' << fmt(row.value) << ',' << fmt(row.snr_db) << ','
        << (row.los ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string summary_json(const std::vector<SweepRow>& rows,
                         const ExperimentConfig& config,
                         std::optional<SweepAxis> axis,
                         const std::vector<PslRequirement>& psl_table) {
  nlohmann::json doc;
  doc["method"] = to_string(config.method);
  doc["n_trials"] = config.n_trials;
  if (axis) doc["sweep_axis"] = to_string(*axis);
  doc["runs"] = nlohmann::json::array();

  for (const SweepRow& row : rows) {
    const ExperimentConfig eff = effective_config(config, axis, row.value);
    nlohmann::json entry;
    if (axis) entry["value"] = row.value;
    entry["bandwidth_hz"] = eff.radio.bandwidth_hz;
    entry["n_anchors"] = eff.scenario.n_anchors;
    entry["horizontal_percentiles_m"] = percentile_block(*row.summary.horizontal);
    entry["vertical_percentiles_m"] = percentile_block(*row.summary.vertical);
    entry["latency_percentiles_s"] = percentile_block(*row.summary.latency);

    nlohmann::json availability;
    for (double threshold : config.availability_thresholds_m) {
      availability[fmt(threshold)] =
          row.summary.horizontal->availability(threshold);
    }
    entry["availability"] = availability;

    entry["psl"] = nlohmann::json::array();
    for (const PslRequirement& psl : psl_table) {
      const PslReport report = evaluate_psl(row.summary, psl);
      nlohmann::json verdict{{"name", report.psl_name}, {"pass", report.pass}};
      verdict["clauses"] = nlohmann::json::array();
      for (const PslClause& clause : report.clauses) {
        verdict["clauses"].push_back({{"name", clause.name},
                                      {"required", clause.required},
                                      {"achieved", clause.achieved},
                                      {"margin", clause.margin},
                                      {"pass", clause.pass}});
      }
      entry["psl"].push_back(verdict);
    }
    doc["runs"].push_back(entry);
  }
  return doc.dump(2);
}

std::vector<TrialRecord> records_from_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw UsageError("results CSV is empty");
  }
  if (line.rfind("trial,", 0) != 0) {
    throw UsageError("results CSV header not recognized");
  }
  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    std::vector<std::string> cols;
    while (std::getline(fields, field, ',')) cols.push_back(field);
    if (cols.size() != 8) {
      throw UsageError("results CSV row with wrong column count");
    }
    TrialRecord record;
    record.trial_index = std::stoi(cols[0]);
    record.horizontal_error_m = std::stod(cols[4]);
    record.vertical_error_m = std::stod(cols[5]);
    record.latency_s = std::stod(cols[6]);
    record.converged = cols[7] == "1";
    record.estimate.converged = record.converged;
    records.push_back(record);
  }
  if (records.empty()) {
    throw UsageError("results CSV contains no rows");
  }
  return records;
}

std::string text_summary(const std::vector<SweepRow>& rows,
                         const ExperimentConfig& config,
                         std::optional<SweepAxis> axis,
                         const std::vector<PslRequirement>& psl_table) {
  std::ostringstream out;
  out << "method " << to_string(config.method) << ", " << config.n_trials
      << " trials per run\n";
  for (const SweepRow& row : rows) {
    const ExperimentConfig eff = effective_config(config, axis, row.value);
    if (axis) {
      out << to_string(*axis) << " = " << fmt(row.value) << ":\n";
    }
    const CdfSummary& h = *row.summary.horizontal;
    out << "  horizontal error p50/p90/p95 = " << fmt(h.percentile(0.5)) << " / "
        << fmt(h.percentile(0.9)) << " / " << fmt(h.percentile(0.95)) << " m\n";
    out << "  availability:";
    for (double threshold : config.availability_thresholds_m) {
      out << "  P(err<=" << fmt(threshold)
          << "m)=" << fmt(h.availability(threshold));
    }
    out << "\n  latency p90 = " << fmt(row.summary.latency->percentile(0.9))
        << " s (" << eff.scenario.n_anchors << " anchors, "
        << fmt(eff.radio.bandwidth_hz / 1e6) << " MHz)\n";
    for (const PslRequirement& psl : psl_table) {
      const PslReport report = evaluate_psl(row.summary, psl);
      out << "  [" << (report.pass ? "PASS" : "FAIL") << "] " << report.psl_name;
      for (const PslClause& clause : report.clauses) {
        out << "  " << clause.name << " margin " << fmt(clause.margin);
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace slpos
