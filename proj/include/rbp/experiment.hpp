#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rbp/trainer.hpp"

namespace rbp {

struct NamedTrainerConfig {
  std::string name;
  TrainerConfig config;

  friend bool operator==(const NamedTrainerConfig&, const NamedTrainerConfig&) = default;
};

struct ExperimentSpec {
  std::string name;
  std::vector<NamedTrainerConfig> runs;
  std::string output_path = "results";
  bool emit_weights = false;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

// Plain-text key-value grammar, documented in the README. Global keys first,
// then one `[run NAME]` section per trainer config. Unknown keys, duplicate
// run names and out-of-range values are errors carrying file and line.
ExperimentSpec parse_config(const std::filesystem::path& path);
ExperimentSpec parse_config_text(std::string_view text, std::string_view origin);

// Emits the grammar back; parse(serialize(spec)) == spec.
std::string serialize_config(const ExperimentSpec& spec);

struct RunSummary {
  std::string name;
  double final_rmse = 0.0;
  double min_eta = 0.0;
  double max_eta = 0.0;
  double mean_eta = 0.0;
  std::size_t clamp_count = 0;
  bool diverged = false;
  std::string message;  // diagnostics only, not part of the CSV schema
};

struct ExperimentResult {
  std::vector<RunSummary> summaries;  // ordered by final rmse, diverged runs last
  std::vector<std::filesystem::path> csv_paths;
  std::filesystem::path summary_path;
  int exit_status = 0;  // 0 iff every run completed without divergence
};

// Executes every run (concurrently; runs share nothing), writes one CSV per
// run with header t,eta,lambda,e1,...,eON,e2,rmse,clamped and a summary CSV
// ranking runs by final rmse. Numbers carry 17 significant digits so reruns
// are byte-comparable.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// Reads run CSVs back and reproduces the per-run statistics, ordered by
// final rmse. Malformed input raises ConfigError naming file and line.
std::vector<RunSummary> summarize(const std::vector<std::filesystem::path>& csv_paths);

void write_run_csv(std::ostream& out, const std::vector<StepRecord>& records,
                   std::size_t out_dim);
void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& summaries);

// 17-significant-digit formatting used for every CSV number.
std::string format_g17(double value);

}  // namespace rbp
