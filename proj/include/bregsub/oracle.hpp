// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "bregsub/blocked_vector.hpp"
#include "bregsub/rng.hpp"

namespace bregsub {

struct Evaluation {
  double value = 0.0;
  BlockedVector element;
};

// Function value plus one deterministic element of a conservative field.
//
// Kinks use fixed tie rules (sign(0) = 0, relu'(0) = 0), so evaluating at
// the same point twice yields bitwise-identical elements, and at points of
// differentiability the element is the gradient.
class ConservativeOracle {
 public:
  explicit ConservativeOracle(LayoutPtr layout) : layout_(std::move(layout)) {}
  virtual ~ConservativeOracle() = default;

  const LayoutPtr& layout() const { return layout_; }
  std::size_t dim() const { return layout_->total_dim(); }

  // Returns f(x) and writes the element into `element` (same layout as x).
  double eval(const BlockedVector& x, BlockedVector& element) const;
  Evaluation eval(const BlockedVector& x) const;
  double value(const BlockedVector& x) const;

 private:
  virtual double do_eval(const BlockedVector& x, BlockedVector& element) const = 0;
  virtual double do_value(const BlockedVector& x) const;

  LayoutPtr layout_;
};

// |<a, x> - b| with element sign(<a, x> - b) a.
class AbsResidualOracle final : public ConservativeOracle {
 public:
  AbsResidualOracle(std::vector<double> a, double b);

 private:
  double do_eval(const BlockedVector& x, BlockedVector& element) const override;
  std::vector<double> a_;
  double b_;
};

// 1/2 ||x - c||^2.
class QuadraticOracle final : public ConservativeOracle {
 public:
  explicit QuadraticOracle(std::vector<double> center);

 private:
  double do_eval(const BlockedVector& x, BlockedVector& element) const override;
  std::vector<double> center_;
};

// f(x) = x^2 - |x| + 1 on R, selection d(x) = 2x - sign(x) with d(0) = 0.
// Not Clarke regular at 0 (upward corner), where the selection vanishes.
class NonregularScalarOracle final : public ConservativeOracle {
 public:
  NonregularScalarOracle();

 private:
  double do_eval(const BlockedVector& x, BlockedVector& element) const override;
};

// Two-layer ReLU network loss f(W1, W2) = 1/2 ||W2 relu(W1 x)||^2 for one
// data vector x. Blocks: "W1" (hidden x in, row-major), "W2" (out x hidden).
// Element: ((relu'(W1 x) o (W2^T W2 h)) x^T,  W2 h h^T), h = relu(W1 x),
// with relu'(a) = 1 for a > 0 and 0 otherwise.
class ReluNetOracle final : public ConservativeOracle {
 public:
  ReluNetOracle(std::size_t d_in, std::size_t d_hidden, std::size_t d_out, std::vector<double> data);

  std::size_t d_in() const { return d_in_; }
  std::size_t d_hidden() const { return d_hidden_; }
  std::size_t d_out() const { return d_out_; }

  static LayoutPtr make_layout(std::size_t d_in, std::size_t d_hidden, std::size_t d_out);

 private:
  double do_eval(const BlockedVector& x, BlockedVector& element) const override;
  std::size_t d_in_, d_hidden_, d_out_;
  std::vector<double> data_;
};

// f = (1/N) sum_i f_i with the averaged element (sum rule).
class FiniteSumObjective {
 public:
  explicit FiniteSumObjective(std::vector<std::shared_ptr<const ConservativeOracle>> components);

  std::size_t size() const { return components_.size(); }
  const LayoutPtr& layout() const { return layout_; }
  const ConservativeOracle& component(std::size_t i) const;

  // Throws std::out_of_range for i >= size().
  double eval_component(std::size_t i, const BlockedVector& x, BlockedVector& element) const;
  Evaluation eval_component(std::size_t i, const BlockedVector& x) const;
  double eval_full(const BlockedVector& x, BlockedVector& element) const;
  Evaluation eval_full(const BlockedVector& x) const;
  double value(const BlockedVector& x) const;

  // xi = d_i(x) - full element(x); O(N).
  BlockedVector noise(std::size_t i, const BlockedVector& x) const;

 private:
  std::vector<std::shared_ptr<const ConservativeOracle>> components_;
  LayoutPtr layout_;
};

enum class SamplingMode { iid, reshuffle, full };

std::string_view to_string(SamplingMode mode);
SamplingMode sampling_mode_from_string(std::string_view name);

// Component index stream.
//
//   reshuffle: every block of N consecutive indices is a fresh permutation of
//              [0, N) (Fisher-Yates with the seeded Rng at each epoch start).
//   iid:       uniform draws with replacement; a step averages batch_size draws.
//   full:      no sampling; every step uses the full element.
//
// Single owner, not thread-safe.
class Sampler {
 public:
  Sampler(SamplingMode mode, std::size_t n, std::uint64_t seed, std::size_t batch_size = 1);

  SamplingMode mode() const { return mode_; }
  std::size_t n() const { return n_; }
  std::size_t batch_size() const { return batch_; }
  // Optimizer steps making up one epoch: N (reshuffle), ceil(N / batch) (iid), 1 (full).
  std::size_t steps_per_epoch() const;
  std::uint64_t draws() const { return draws_; }

  // Throws std::logic_error in full mode.
  std::size_t next_index();

 private:
  SamplingMode mode_;
  std::size_t n_;
  std::size_t batch_;
  Rng rng_;
  std::vector<std::size_t> perm_;
  std::uint64_t draws_ = 0;
};

// sup over s <= i <= Lambda(lambda(s) + horizon) of || sum_{k=s}^{i} eta_k xi_k ||,
// where lambda is the prefix sum of etas.
double noise_window_sup(std::span<const double> etas, std::span<const BlockedVector> xis, double horizon,
                        std::size_t start);

// Largest noise_window_sup over window starts in the trailing half of the
// run. A diagnostic for the vanishing-noise condition, not a proof.
// Throws std::invalid_argument for empty or unequal-length input.
double noise_partial_sum_check(std::span<const double> etas, std::span<const BlockedVector> xis, double horizon);

// Drift radius 2 N sum ||x_{l+1} - x_l|| accumulated over the steps of the
// current reshuffling epoch.
double epoch_drift_delta(std::span<const double> step_norms, std::size_t n);

}  // namespace bregsub
