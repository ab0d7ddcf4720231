#include "slpos/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "slpos/config.hpp"
#include "slpos/errors.hpp"
#include "slpos/harness.hpp"
#include "slpos/protocol.hpp"
#include "slpos/psl.hpp"
#include "slpos/report.hpp"

namespace slpos {

namespace fs = std::filesystem;

namespace {

// Removes everything this invocation managed to write before it failed.
class OutputSet {
 public:
  void track(const fs::path& path) { written_.push_back(path); }

  void write(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw Error("cannot write output file: " + path.string());
    }
    out << content;
    if (!out.good()) {
      throw Error("failed while writing: " + path.string());
    }
    track(path);
  }

  void discard_all() {
    for (const fs::path& path : written_) {
      std::error_code ec;
      fs::remove(path, ec);
    }
  }

 private:
  std::vector<fs::path> written_;
};

std::vector<PslRequirement> load_psl_table(const std::string& path) {
  if (path.empty()) return default_psl_table();
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot open PSL table: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return psl_table_from_json(buffer.str());
}

void execute_run_or_sweep(const CliInvocation& invocation, bool is_sweep) {
  ExperimentFile file =
      load_experiment_file(invocation.config_path, invocation.overrides);
  if (invocation.seed) file.config.master_seed = *invocation.seed;
  if (is_sweep && !file.sweep_axis) {
    throw ConfigurationError("sweep subcommand needs a sweep block in the config");
  }

  std::vector<MeasurementRow> measurement_rows;
  std::vector<SweepRow> rows;
  std::optional<SweepAxis> axis;
  if (is_sweep) {
    axis = file.sweep_axis;
    rows = sweep(file.config, *axis, file.sweep_values, invocation.workers);
  } else {
    SweepRow row;
    row.value = 0.0;
    row.records = run(file.config, invocation.workers,
                      invocation.dump_measurements ? &measurement_rows : nullptr);
    row.summary = summarize(row.records);
    rows.push_back(std::move(row));
  }

  const std::vector<PslRequirement> psl_table =
      load_psl_table(invocation.psl_table_path);

  fs::create_directories(invocation.output_dir);
  OutputSet outputs;
  try {
    outputs.write(fs::path(invocation.output_dir) / "results.csv",
                  results_csv(rows, file.config, axis));
    outputs.write(fs::path(invocation.output_dir) / "summary.json",
                  summary_json(rows, file.config, axis, psl_table));
    if (invocation.dump_measurements && !is_sweep) {
      outputs.write(fs::path(invocation.output_dir) / "measurements.csv",
                    measurements_csv(measurement_rows));
    }
  } catch (...) {
    outputs.discard_all();
    throw;
  }
  std::cout << text_summary(rows, file.config, axis, psl_table);
}

void execute_psl_check(const CliInvocation& invocation) {
  if (invocation.results_path.empty()) {
    throw UsageError("psl-check needs --results pointing at a results CSV");
  }
  std::ifstream in(invocation.results_path);
  if (!in) {
    throw UsageError("cannot open results CSV: " + invocation.results_path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::vector<TrialRecord> records =
      records_from_results_csv(buffer.str());
  const RunSummary summary = summarize(records);

  for (const PslRequirement& psl : load_psl_table(invocation.psl_table_path)) {
    const PslReport report = evaluate_psl(summary, psl);
    std::cout << (report.pass ? "PASS " : "FAIL ") << report.psl_name;
    for (const PslClause& clause : report.clauses) {
      std::cout << "  " << clause.name << " required=" << clause.required
                << " achieved=" << clause.achieved
                << " margin=" << clause.margin;
    }
    std::cout << '\n';
  }
}

void execute_protocol_trace(const CliInvocation& invocation) {
  ExperimentFile file =
      load_experiment_file(invocation.config_path, invocation.overrides);
  SessionKind kind = file.config.session;
  if (!invocation.session.empty()) {
    kind = session_kind_from_string(invocation.session);
  }
  const Session session = run_happy_path(
      kind, {file.config.method, file.config.scenario.n_anchors},
      file.config.delays);

  fs::create_directories(invocation.output_dir);
  OutputSet outputs;
  outputs.write(fs::path(invocation.output_dir) / "trace.jsonl",
                trace_to_json_lines(session));
  std::cout << to_string(kind) << " session, " << session.trace.size()
            << " messages, latency " << session_latency_s(session) << " s\n";
}

}  // namespace

CliInvocation parse_and_validate(int argc, const char* const* argv) {
  CLI::App app{"sidelink positioning simulator"};
  app.require_subcommand(1);

  CliInvocation invocation;
  std::uint64_t seed_value = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* config_opt =
        cmd->add_option("--config", invocation.config_path, "experiment config JSON");
    if (needs_config) config_opt->required();
    cmd->add_option("--out", invocation.output_dir, "output directory");
    cmd->add_option("--set", invocation.overrides,
                    "dotted.key=value config override (repeatable)");
    cmd->add_option("--workers", invocation.workers, "worker thread count");
    cmd->add_option("--seed", seed_value, "master seed override")
        ->each([&](const std::string&) { seed_set = true; });
  };

  CLI::App* cmd_run = app.add_subcommand("run", "single Monte Carlo run");
  add_common(cmd_run, true);
  cmd_run->add_flag("--dump-measurements", invocation.dump_measurements,
                    "also write raw measurements.csv");

  CLI::App* cmd_sweep = app.add_subcommand("sweep", "parameter sweep");
  add_common(cmd_sweep, true);

  CLI::App* cmd_psl = app.add_subcommand("psl-check", "evaluate a results CSV");
  cmd_psl->add_option("--results", invocation.results_path, "results CSV path")
      ->required();
  cmd_psl->add_option("--psl-table", invocation.psl_table_path,
                      "PSL table JSON (defaults to the built-in table)");

  CLI::App* cmd_trace =
      app.add_subcommand("protocol-trace", "emit a session message trace");
  add_common(cmd_trace, true);
  cmd_trace->add_option("--session", invocation.session,
                        "session kind: nsl-mt-lr | nsl-mo-lr | usl");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    throw UsageError(err.what());
  }
  invocation.subcommand = app.get_subcommands().front()->get_name();
  if (seed_set) invocation.seed = seed_value;
  if (invocation.workers < 1) {
    throw UsageError("--workers must be >= 1");
  }

  // Validate the whole configuration up front, before any computation.
  if (invocation.subcommand != "psl-check") {
    ExperimentFile file =
        load_experiment_file(invocation.config_path, invocation.overrides);
    if (invocation.subcommand == "sweep" && !file.sweep_axis) {
      throw ConfigurationError("sweep subcommand needs a sweep block in the config");
    }
    if (!invocation.session.empty()) {
      session_kind_from_string(invocation.session);
    }
  }
  return invocation;
}

void execute(const CliInvocation& invocation) {
  if (invocation.subcommand == "run") {
    execute_run_or_sweep(invocation, false);
  } else if (invocation.subcommand == "sweep") {
    execute_run_or_sweep(invocation, true);
  } else if (invocation.subcommand == "psl-check") {
    execute_psl_check(invocation);
  } else if (invocation.subcommand == "protocol-trace") {
    execute_protocol_trace(invocation);
  } else {
    throw UsageError("unknown subcommand: " + invocation.subcommand);
  }
}

int run_cli(int argc, const char* const* argv) {
  try {
    const CliInvocation invocation = parse_and_validate(argc, argv);
    execute(invocation);
    return kExitOk;
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const ConfigurationError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace slpos
