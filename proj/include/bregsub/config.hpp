// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bregsub/error.hpp"
#include "bregsub/kernel.hpp"
#include "bregsub/optim.hpp"
#include "bregsub/oracle.hpp"
#include "bregsub/prox.hpp"
#include "bregsub/schedule.hpp"

namespace bregsub {

// Experiment configuration file format
//
//   # comment            (also ';'; whole-line only)
//   [section]
//   key = value
//
// Sections and keys (defaults in parentheses):
//
//   [problem]    name (l1_regression): l1_regression | lasso_lad | relu_net |
//                                      nonregular_scalar | quadratic
//                l1_regression: m (50), n (2), data_seed (7), consistent (false)
//                lasso_lad:     m (20), n (2), lambda (0.1), data_seed (3)
//                relu_net:      d_in (3), d_hidden (4), d_out (2), samples (16), data_seed (7)
//                quadratic:     n (2), components (1), data_seed (7)
//   [kernel]     kind (euclidean): euclidean | block_poly | coord_poly
//                sigma (0.01, >= 0), degree (4, integer >= 4)
//   [optimizer]  method (sbg): sbg | sbg_precond | msbg | imsbg | sbpg
//                eta0 (0.1, > 0), eta_schedule (log_decay): constant | log_decay | staged_lstm
//                theta0 (0.1, in (0, 1]), theta_schedule (log_decay)       momentum methods only
//                tau (0 = theta0 / eta0, >= 0)                               momentum methods only
//                nu0 (1e-4, > 0), budget_epochs (100)
//                stationarity_target (0 = off), proxy_window (50, >= 1)
//   [composite]  regularizer (zero): zero | l1, lambda (0), constraint (whole_space):
//                whole_space | box | nonneg, lower (-1), upper (1)       not for lasso_lad
//   [sampler]    mode (reshuffle): reshuffle | iid | full, seed (1), batch (1)
//   [output]     dir (out), trace_stride (1, >= 1)
//
// Unknown keys, keys that do not apply to the chosen problem or method, and
// duplicate keys are errors. All errors are collected before reporting.
struct ProblemConfig {
  std::string name = "l1_regression";
  std::size_t m = 50;
  std::size_t n = 2;
  double lambda = 0.1;
  std::uint64_t data_seed = 7;
  bool consistent = false;
  std::size_t d_in = 3;
  std::size_t d_hidden = 4;
  std::size_t d_out = 2;
  std::size_t samples = 16;
  std::size_t components = 1;

  bool operator==(const ProblemConfig&) const = default;
};

struct OptimizerConfig {
  Method method = Method::sbg;
  double eta0 = 0.1;
  ScheduleKind eta_schedule = ScheduleKind::log_decay;
  double theta0 = 0.1;
  ScheduleKind theta_schedule = ScheduleKind::log_decay;
  double tau = 0.0;
  double nu0 = 1e-4;
  std::size_t budget_epochs = 100;
  double stationarity_target = 0.0;
  std::size_t proxy_window = 50;

  bool operator==(const OptimizerConfig&) const = default;
};

struct CompositeConfig {
  RegularizerKind regularizer = RegularizerKind::zero;
  double lambda = 0.0;
  ConstraintKind constraint = ConstraintKind::whole_space;
  double lower = -1.0;
  double upper = 1.0;

  bool operator==(const CompositeConfig&) const = default;
};

struct SamplerConfig {
  SamplingMode mode = SamplingMode::reshuffle;
  std::uint64_t seed = 1;
  std::size_t batch = 1;

  bool operator==(const SamplerConfig&) const = default;
};

struct OutputConfig {
  std::string dir = "out";
  std::size_t trace_stride = 1;

  bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
  ProblemConfig problem;
  KernelSpec kernel;
  OptimizerConfig optimizer;
  CompositeConfig composite;
  SamplerConfig sampler;
  OutputConfig output;

  bool operator==(const ExperimentConfig&) const = default;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

// Throws ConfigError listing every problem found.
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig parse_config(const std::filesystem::path& path);

// All rule violations of an already-populated config (empty when valid).
std::vector<std::string> validation_errors(const ExperimentConfig& config);
void validate(const ExperimentConfig& config);

// Canonical text with every applicable key; parse_config_text(echo) == config.
std::string config_echo(const ExperimentConfig& config);

RunSettings to_run_settings(const ExperimentConfig& config);

}  // namespace bregsub
