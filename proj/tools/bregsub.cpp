// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bregsub/config.hpp"
#include "bregsub/experiment.hpp"
#include "bregsub/selftest.hpp"
#include "bregsub/simd.hpp"
#include "bregsub/trace.hpp"

namespace {

using namespace bregsub;

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out_dir) {
  ExperimentConfig cfg = parse_config(config_path);
  if (seed) cfg.sampler.seed = *seed;
  if (!out_dir.empty()) cfg.output.dir = out_dir;
  const ExperimentOutcome out = run_experiment(cfg);
  std::cout << format_summary(cfg, out);
  std::cout << "output: " << cfg.output.dir << '\n';
  return out.exit_code;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::uint64_t>& seeds, const std::vector<double>& grid,
              const std::string& out_dir, unsigned jobs) {
  ExperimentConfig cfg = parse_config(config_path);
  if (!out_dir.empty()) cfg.output.dir = out_dir;
  const SweepReport report = sweep(cfg, {seeds, grid, jobs});
  std::cout << "eta0,runs,failed,final_f_mean,final_f_min,final_f_max\n";
  for (const auto& a : report.aggregates) {
    std::cout << format_double(a.eta0) << ',' << a.runs << ',' << a.failed << ',' << format_double(a.final_f_mean)
              << ',' << format_double(a.final_f_min) << ',' << format_double(a.final_f_max) << '\n';
  }
  for (const auto& c : report.cells) {
    if (!c.ok()) std::cerr << "cell eta0=" << format_double(c.eta0) << " seed=" << c.seed << " failed: " << c.error << '\n';
  }
  return report.exit_code;
}

int cmd_selftest() {
  std::cout << "simd backend: " << simd::active().name << '\n';
  int failed = 0;
  for (const auto& c : run_selftest()) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.passed) {
      std::cout << ": " << c.detail;
      ++failed;
    }
    std::cout << '\n';
  }
  return failed == 0 ? 0 : 1;
}

int cmd_diff(const std::string& a, const std::string& b, bool strict) {
  const TraceDiff d = diff_trace_files(a, b, !strict);
  if (d.equal) {
    std::cout << "identical" << (strict ? "" : " (wall_ns ignored)") << '\n';
    return 0;
  }
  std::cout << "differ at line " << d.line << ": " << d.detail << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic Bregman subgradient methods: experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run one experiment and write trace.csv, summary.txt, config_echo.ini");
  run->add_option("config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override [sampler] seed");
  run->add_option("--out", out_dir, "Override [output] dir");

  std::vector<std::uint64_t> seeds;
  std::vector<double> grid;
  unsigned jobs = 1;
  auto* sw = app.add_subcommand("sweep", "Run seeds x eta0 cells and aggregate final f");
  sw->add_option("config", config_path, "Base experiment config")->required()->check(CLI::ExistingFile);
  sw->add_option("--seeds", seeds, "Comma-separated sampler seeds")->required()->delimiter(',');
  sw->add_option("--eta0-grid", grid, "Comma-separated initial stepsizes")->delimiter(',');
  sw->add_option("--out", out_dir, "Override [output] dir");
  sw->add_option("--jobs", jobs, "Cells run in parallel")->check(CLI::PositiveNumber);

  std::string trace_path;
  auto* diag = app.add_subcommand("diagnose", "Summarize a trace; writes <trace>.report.txt");
  diag->add_option("trace", trace_path, "trace.csv")->required()->check(CLI::ExistingFile);

  auto* self = app.add_subcommand("selftest", "Run the built-in property checks");

  std::string diff_a, diff_b;
  bool strict = false;
  auto* diff = app.add_subcommand("diff", "Compare two traces, ignoring wall_ns unless --strict");
  diff->add_option("a", diff_a)->required()->check(CLI::ExistingFile);
  diff->add_option("b", diff_b)->required()->check(CLI::ExistingFile);
  diff->add_flag("--strict", strict, "Also compare wall_ns");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, seed, out_dir);
    if (*sw) return cmd_sweep(config_path, seeds, grid, out_dir, jobs);
    if (*diag) {
      std::cout << diagnose_file(trace_path);
      return 0;
    }
    if (*self) return cmd_selftest();
    if (*diff) return cmd_diff(diff_a, diff_b, strict);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return 0;
}
