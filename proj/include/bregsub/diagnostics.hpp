// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bregsub/blocked_vector.hpp"
#include "bregsub/kernel.hpp"
#include "bregsub/trace.hpp"

namespace bregsub {

// Continuous time attached to iterations: lambda(k) = sum_{i<k} eta_i and
// its inverse Lambda(t) = sup{k : lambda(k) <= t}.
class TimeAxis {
 public:
  TimeAxis() : lambdas_{0.0} {}
  explicit TimeAxis(std::span<const double> etas);

  void push(double eta);
  std::size_t steps() const { return lambdas_.size() - 1; }
  double lambda(std::size_t k) const { return lambdas_.at(k); }
  double horizon() const { return lambdas_.back(); }
  double eta(std::size_t k) const { return etas_.at(k); }
  // Throws std::out_of_range for t < 0 or t > horizon().
  std::size_t inverse(double t) const;

 private:
  std::vector<double> lambdas_;
  std::vector<double> etas_;
};

// Dual iterates grad phi(x_k) recorded every `stride` iterations (plus the
// last one), with the piecewise-linear dual interpolation
//   x(t) = grad_conj(y_k + (t - lambda(k)) / eta_k * (y_{k+1} - y_k)),  k = Lambda(t).
class DualPath {
 public:
  explicit DualPath(std::size_t stride = 1) : stride_(stride == 0 ? 1 : stride) {}

  std::size_t stride() const { return stride_; }
  const TimeAxis& time_axis() const { return axis_; }

  void push_step(double eta) { axis_.push(eta); }
  // Records x_k and its dual point; k must not precede earlier records.
  void record(std::size_t k, BlockedVector x, BlockedVector dual);
  bool has(std::size_t k) const;
  const BlockedVector& primal(std::size_t k) const;
  const BlockedVector& dual(std::size_t k) const;

  // Throws std::out_of_range outside [0, horizon] and std::invalid_argument
  // when t falls strictly inside a segment whose endpoints were not both
  // recorded (interpolation across a stride is refused, not coarsened).
  BlockedVector interpolate(const Kernel& kernel, double t) const;

 private:
  std::size_t slot(std::size_t k) const;

  std::size_t stride_;
  TimeAxis axis_;
  std::vector<std::size_t> iters_;
  std::vector<BlockedVector> primals_;
  std::vector<BlockedVector> duals_;
};

// h(x, m) = f(x) + ||m||^2 / (2 tau).
double lyapunov_msbg(double f_value, const BlockedVector& m, double tau);
double lyapunov_msbg(double f_value, double m_norm, double tau);

// Norm of the average of the given conservative elements.
// Throws std::invalid_argument for an empty window.
double stationarity_proxy(std::span<const BlockedVector> recent_elements);

// Fixed-capacity ring of the most recent elements, for in-loop proxies.
class ElementWindow {
 public:
  explicit ElementWindow(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

  void push(const BlockedVector& element);
  std::size_t size() const { return items_.size(); }
  bool full() const { return items_.size() == capacity_; }
  double proxy() const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<BlockedVector> items_;
};

// eta_k * dual_step_norm for every step row (iter > 0).
std::vector<double> dual_increment_norms(std::span<const TraceRecord> trace);

struct DualIncrementSummary {
  double tail_max = 0.0;
  double threshold = 0.0;
  bool below_threshold = true;
};

DualIncrementSummary summarize_dual_increments(std::span<const TraceRecord> trace, double threshold,
                                               double tail_fraction = 0.1);

// max - min over the trailing ceil(fraction * n) entries (at least one).
double trailing_oscillation(std::span<const double> values, double fraction = 0.1);

struct TraceReport {
  std::size_t rows = 0;
  std::uint64_t last_iter = 0;
  double final_f = 0.0;
  double best_f = 0.0;
  double f_trailing_oscillation = 0.0;
  // Present when the trace carries momentum (theta > 0).
  std::optional<double> lyapunov_trailing_oscillation;
  std::optional<double> tau_first;
  std::optional<double> tau_last;
  double final_m_norm = 0.0;
  double final_stationarity_proxy = 0.0;
  double max_cert_residual = 0.0;
  DualIncrementSummary dual_increments;
};

TraceReport diagnose_trace(std::span<const TraceRecord> trace, double increment_threshold = 1e-2);
// Human-readable key: value report.
std::string format_report(const TraceReport& report);

}  // namespace bregsub
