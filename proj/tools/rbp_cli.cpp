#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rbp/errors.hpp"
#include "rbp/experiment.hpp"

namespace {

void print_summaries(const std::vector<rbp::RunSummary>& summaries) {
  rbp::write_summary_csv(std::cout, summaries);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online identification experiments: recursive gradient training of a "
               "three-layer network against the built-in two-input two-output plant"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed_override = 0;
  bool have_seed = false;
  std::uint64_t steps_override = 0;
  bool have_steps = false;
  std::string out_override;

  CLI::App* run_cmd = app.add_subcommand("run", "Execute every run in a config file");
  run_cmd->add_option("config", config_path, "experiment configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed_override, "override the seed of every run")
      ->each([&](const std::string&) { have_seed = true; });
  run_cmd->add_option("--steps", steps_override, "override the step budget of every run")
      ->each([&](const std::string&) { have_steps = true; });
  run_cmd->add_option("--out", out_override, "override the output directory");

  std::vector<std::string> csv_args;
  CLI::App* sum_cmd = app.add_subcommand("summarize", "Recompute run statistics from CSVs");
  sum_cmd->add_option("csv", csv_args, "run CSV files")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      rbp::ExperimentSpec spec = rbp::parse_config(config_path);
      if (have_seed) {
        for (auto& run : spec.runs) run.config.seed = seed_override;
      }
      if (have_steps) {
        if (steps_override == 0) {
          std::cerr << "error: --steps must be >= 1\n";
          return 2;
        }
        for (auto& run : spec.runs) run.config.steps = steps_override;
      }
      if (!out_override.empty()) spec.output_path = out_override;

      const rbp::ExperimentResult result = rbp::run_experiment(spec);
      for (const auto& s : result.summaries) {
        if (s.diverged) {
          std::cerr << "run '" << s.name << "' diverged"
                    << (s.message.empty() ? "" : ": " + s.message) << "\n";
        }
      }
      print_summaries(result.summaries);
      std::cout << "summary written to " << result.summary_path.string() << "\n";
      return result.exit_status;
    }

    std::vector<std::filesystem::path> paths(csv_args.begin(), csv_args.end());
    print_summaries(rbp::summarize(paths));
    return 0;
  } catch (const rbp::ConfigError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
