// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bregsub/blocked_vector.hpp"
#include "bregsub/diagnostics.hpp"
#include "bregsub/kernel.hpp"
#include "bregsub/oracle.hpp"
#include "bregsub/prox.hpp"
#include "bregsub/schedule.hpp"
#include "bregsub/trace.hpp"

namespace bregsub {

enum class Method { sbg, sbg_precond, msbg, imsbg, sbpg };

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);
bool uses_momentum(Method method);

struct OptimizerState {
  BlockedVector x;
  BlockedVector m;  // zero-initialized momentum
  BlockedVector g;  // element sampled at the last step
  std::size_t k = 0;
  std::size_t epoch = 0;

  static OptimizerState start(BlockedVector x0);
};

// What one update did. cert_residual is the nu-certificate quantity for the
// exact methods and the implicit inexactness ||g + (grad phi(x+) - grad phi(x))/eta||
// for the preconditioned ones (m in place of g for the momentum x-update).
struct StepReport {
  double eta = 0.0;
  double theta = 0.0;
  double nu = 0.0;
  double dual_step_norm = 0.0;
  double cert_residual = 0.0;
};

inline constexpr double kNoCertificate = std::numeric_limits<double>::infinity();

// ---- Updates with an explicit element g -------------------------------------
//
// These are the algorithmic cores. Exact updates throw CertificateError when
// the nu-certificate fails and propagate ConvergenceError from grad_conj.

// x+ = grad_conj(grad phi(x) - eta g)
StepReport sbg_update(const Kernel& kernel, BlockedVector& x, const BlockedVector& g, double eta, double nu);
// x+ = x - eta (hess phi(x))^{-1} g
StepReport sbg_precond_update(const Kernel& kernel, BlockedVector& x, const BlockedVector& g, double eta);
// x+ = grad_conj(grad phi(x) - eta m);  m+ = m - theta (hess phi(x))^{-1} (m - g), both at the pre-update x.
StepReport msbg_update(const Kernel& kernel, BlockedVector& x, BlockedVector& m, const BlockedVector& g, double eta,
                       double theta, double nu);
// x+ = x - eta (hess phi(x))^{-1} m;  m+ = m - theta (hess phi(x))^{-1} (m - g).
StepReport imsbg_update(const Kernel& kernel, BlockedVector& x, BlockedVector& m, const BlockedVector& g, double eta,
                        double theta);
// x+ = forward_backward(x, g); both composite certificates must hold.
StepReport sbpg_update(const Kernel& kernel, const Regularizer& r, const ConstraintSet& x_set, BlockedVector& x,
                       const BlockedVector& g, double eta, double nu);

// Writes the sampled element at x into `out`: one component (reshuffle), a
// batch average (iid) or the full element (full).
void sample_element(const FiniteSumObjective& objective, Sampler& sampler, const BlockedVector& x,
                    BlockedVector& out);

// ---- Sampled steps: draw g_k at x_k, update, advance k and epoch -----------

StepReport sbg_step(OptimizerState& state, const Kernel& kernel, const FiniteSumObjective& objective,
                    Sampler& sampler, double eta, double nu);
StepReport sbg_precond_step(OptimizerState& state, const Kernel& kernel, const FiniteSumObjective& objective,
                            Sampler& sampler, double eta);
StepReport msbg_step(OptimizerState& state, const Kernel& kernel, const FiniteSumObjective& objective,
                     Sampler& sampler, double eta, double theta, double nu);
StepReport imsbg_step(OptimizerState& state, const Kernel& kernel, const FiniteSumObjective& objective,
                      Sampler& sampler, double eta, double theta);
StepReport sbpg_step(OptimizerState& state, const Kernel& kernel, const FiniteSumObjective& objective,
                     Sampler& sampler, const Regularizer& r, const ConstraintSet& x_set, double eta, double nu);

// ---- Full runs --------------------------------------------------------------

struct RunSettings {
  Method method = Method::sbg;
  Schedule eta_schedule{ScheduleKind::log_decay, 0.1};
  Schedule theta_schedule{ScheduleKind::log_decay, 0.1};
  // Target lim theta_k / eta_k; 0 means theta_schedule.base / eta_schedule.base.
  double tau = 0.0;
  ToleranceSchedule nu;
  std::size_t budget_epochs = 100;
  std::size_t trace_stride = 1;
  std::size_t proxy_window = 50;
  // Stop once the window is full and the proxy drops below this; 0 disables.
  double stationarity_target = 0.0;
  Regularizer regularizer;
  ConstraintSet constraint;
  // Keep x_k and grad phi(x_k) every dual_stride iterations for interpolation.
  bool record_duals = false;
  std::size_t dual_stride = 1;

  double resolved_tau() const;
};

enum class RunStatus { completed, target_reached, certificate_failure, solver_failure };

std::string_view to_string(RunStatus status);

struct RunResult {
  OptimizerState state;
  std::vector<TraceRecord> trace;
  RunStatus status = RunStatus::completed;
  std::string message;
  std::size_t iterations = 0;
  double best_value = 0.0;
  double max_cert_residual = 0.0;
  std::vector<double> etas;
  std::optional<DualPath> duals;
  std::vector<std::string> warnings;

  bool ok() const { return status == RunStatus::completed || status == RunStatus::target_reached; }
};

// Validates the method/kernel/regularizer/constraint combination; throws
// UnsupportedError or std::invalid_argument.
void validate_run(const Kernel& kernel, const RunSettings& settings);

// Executes budget_epochs * steps_per_epoch iterations (or until the
// stationarity target is met). Row 0 describes x0; row k the state after
// step k. Step failures end the run with a non-ok status; rows written so far
// are flushed to `sink`. Deterministic given the sampler seed.
RunResult run(const FiniteSumObjective& objective, const Kernel& kernel, Sampler& sampler, BlockedVector x0,
              const RunSettings& settings, TraceSink* sink = nullptr);

}  // namespace bregsub
