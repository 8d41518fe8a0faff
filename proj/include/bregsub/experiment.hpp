// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bregsub/config.hpp"
#include "bregsub/optim.hpp"
#include "bregsub/problems.hpp"

namespace bregsub {

// Exit codes shared by run, sweep and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitCertificate = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitSweepFailures = 4;

Problem build_problem(const ProblemConfig& config);

struct ExperimentOutcome {
  int exit_code = kExitOk;
  RunResult result;
  ProblemSpec spec;
  double final_f = 0.0;
  std::optional<double> oracle_gap;
};

// Runs in memory; no files are touched.
ExperimentOutcome execute(const ExperimentConfig& config);

// Writes <dir>/trace.csv, <dir>/summary.txt and <dir>/config_echo.ini, where
// dir is config.output.dir. The trace is flushed even when a step fails.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

std::string format_summary(const ExperimentConfig& config, const ExperimentOutcome& outcome);

struct SweepOptions {
  std::vector<std::uint64_t> seeds;
  // Empty: the config's own eta0.
  std::vector<double> eta0_grid;
  unsigned jobs = 1;
};

struct SweepCell {
  double eta0 = 0.0;
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  int exit_code = kExitOk;
  std::string error;
  double final_f = 0.0;
  double best_f = 0.0;
  std::optional<double> oracle_gap;

  bool ok() const { return exit_code == kExitOk; }
};

struct SweepAggregate {
  double eta0 = 0.0;
  std::size_t runs = 0;
  std::size_t failed = 0;
  double final_f_mean = 0.0;
  double final_f_min = 0.0;
  double final_f_max = 0.0;
};

struct SweepReport {
  std::vector<SweepCell> cells;
  std::vector<SweepAggregate> aggregates;
  int exit_code = kExitOk;
};

// Cartesian product eta0 x seed. Cell outputs go to
// <dir>/eta0_<eta0>/seed_<seed>/; <dir>/sweep_runs.csv and
// <dir>/sweep_summary.csv are written once every cell has finished.
// A failing cell is recorded and the sweep continues.
SweepReport sweep(const ExperimentConfig& base, const SweepOptions& options);

// Reads a trace, writes <trace>.report.txt and returns the report text.
std::string diagnose_file(const std::filesystem::path& trace_path);

}  // namespace bregsub
