// obscura CLI: analytic reports, Monte Carlo runs, fleet and epoch
// simulations, the measure catalog, and a crack-time calculator.
//
// Exit codes: 0 success, 2 validation/parse error, 3 runtime error.
// Reports go to stdout (or --output); diagnostics go to stderr.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "obscura/obscura.hpp"

namespace {

struct CommonOptions {
  std::string scenario_path;
  std::string format = "json";
  std::string output;
  std::string mode;
  std::int64_t trials = 10000;
  std::uint64_t seed = 0;
  int threads = 0;
};

void add_format_options(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--format", opts.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd->add_option("--output", opts.output,
                  "Write the report to this file instead of stdout");
}

void add_scenario_option(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--scenario", opts.scenario_path, "Scenario JSON file")
      ->required();
}

void add_mode_option(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--mode", opts.mode,
                  "Override the scenario's filter composition mode")
      ->check(CLI::IsMember({"additive", "multiplicative-survival"}));
}

void add_sim_options(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--trials", opts.trials, "Monte Carlo trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seed", opts.seed, "Master seed")->capture_default_str();
  cmd->add_option("--threads", opts.threads,
                  "Worker threads (0 = hardware concurrency)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

obscura::Scenario load_scenario(const CommonOptions& opts) {
  auto scenario = obscura::load_scenario_file(opts.scenario_path);
  if (!opts.mode.empty()) {
    scenario.composition_mode =
        *obscura::composition_mode_from_string(opts.mode);
  }
  return scenario;
}

void print_work_factor_warnings(const obscura::Scenario& scenario) {
  for (const auto& warning :
       obscura::work_factor_warnings(scenario.stack)) {
    std::cerr << "warning: " << warning << "\n";
  }
}

void write_report(const std::string& text, const CommonOptions& opts) {
  if (opts.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(opts.output, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file '" + opts.output + "'");
  }
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "obscura: quantitative valuation of obscurity-based defense layers"};
  app.require_subcommand(1);

  CommonOptions opts;
  double horizon = std::numeric_limits<double>::infinity();
  bool horizon_given = false;
  double knowledge_reset = 1.0;
  std::int64_t crack_length = 0;
  std::int64_t crack_charset = 0;
  double crack_rate = 0.0;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "Closed-form report: residual threat, scaled "
                 "time-to-compromise, work factors, ALE");
  add_scenario_option(analyze, opts);
  add_mode_option(analyze, opts);
  add_format_options(analyze, opts);

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo attacker-population simulation");
  add_scenario_option(simulate, opts);
  add_mode_option(simulate, opts);
  add_sim_options(simulate, opts);
  simulate
      ->add_option("--horizon", horizon,
                   "Horizon in hours for the compromise probability")
      ->check(CLI::NonNegativeNumber);
  add_format_options(simulate, opts);

  CLI::App* fleet = app.add_subcommand(
      "fleet", "Shared-secret vs per-instance-randomized fleet simulation");
  add_scenario_option(fleet, opts);
  add_sim_options(fleet, opts);
  add_format_options(fleet, opts);

  CLI::App* epochs = app.add_subcommand(
      "epochs", "Moving-target simulation with periodic regeneration");
  add_scenario_option(epochs, opts);
  add_mode_option(epochs, opts);
  add_sim_options(epochs, opts);
  epochs->add_option("--horizon", horizon, "Total horizon in hours")
      ->required()
      ->check(CLI::NonNegativeNumber);
  epochs
      ->add_option("--reset", knowledge_reset,
                   "Probability a regeneration invalidates an attacker's "
                   "progress (1 = full reset)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_format_options(epochs, opts);

  CLI::App* catalog =
      app.add_subcommand("catalog", "Dump the built-in measure catalog");
  add_format_options(catalog, opts);

  CLI::App* crack =
      app.add_subcommand("crack", "Expected brute-force crack time");
  crack->add_option("--length", crack_length, "Password length")
      ->required()
      ->check(CLI::PositiveNumber);
  crack->add_option("--charset", crack_charset, "Character set size")
      ->required()
      ->check(CLI::PositiveNumber);
  crack->add_option("--rate", crack_rate, "Guesses per second")
      ->required()
      ->check(CLI::PositiveNumber);
  add_format_options(crack, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (simulate->count("--horizon") > 0) horizon_given = true;

  const obscura::ReportFormat format =
      *obscura::report_format_from_string(opts.format);

  try {
    if (*analyze) {
      const auto scenario = load_scenario(opts);
      print_work_factor_warnings(scenario);
      write_report(obscura::emit_report(obscura::analyze(scenario), format),
                   opts);
    } else if (*simulate) {
      const auto scenario = load_scenario(opts);
      print_work_factor_warnings(scenario);
      obscura::SimOptions sim;
      sim.threads = opts.threads;
      if (horizon_given) sim.horizon_hours = horizon;
      write_report(
          obscura::emit_report(
              obscura::run_trials(scenario, opts.trials, opts.seed, sim),
              format),
          opts);
    } else if (*fleet) {
      const auto scenario = load_scenario(opts);
      if (!scenario.fleet) {
        std::cerr << "error: scenario '" << opts.scenario_path
                  << "' has no fleet configuration\n";
        return 2;
      }
      write_report(obscura::emit_report(
                       obscura::simulate_fleet(*scenario.fleet, opts.trials,
                                               opts.seed, opts.threads),
                       format),
                   opts);
    } else if (*epochs) {
      const auto scenario = load_scenario(opts);
      if (!scenario.epoch_hours) {
        std::cerr << "error: MissingEpochLength: scenario '"
                  << opts.scenario_path << "' has no epoch_hours\n";
        return 2;
      }
      obscura::EpochOptions epoch_options;
      epoch_options.knowledge_reset = knowledge_reset;
      epoch_options.threads = opts.threads;
      write_report(
          obscura::emit_report(
              obscura::simulate_epochs(scenario, horizon, opts.trials,
                                       opts.seed, epoch_options),
              format),
          opts);
    } else if (*catalog) {
      write_report(obscura::emit_catalog(obscura::builtin_measures(), format),
                   opts);
    } else if (*crack) {
      write_report(
          obscura::emit_report(
              obscura::make_crack_report(crack_length, crack_charset,
                                         crack_rate),
              format),
          opts);
    }
  } catch (const obscura::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const obscura::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const obscura::UnknownMeasureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
