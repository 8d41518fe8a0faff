// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#include "bregsub/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "bregsub/error.hpp"
#include "bregsub/simd.hpp"

namespace bregsub {
namespace {

double sign_or_zero(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

// ---- ConservativeOracle ----------------------------------------------------

double ConservativeOracle::eval(const BlockedVector& x, BlockedVector& element) const {
  if (!(x.layout() == *layout_)) {
    throw DimensionError("oracle: point of dimension " + std::to_string(x.total_dim()) +
                         " for oracle of dimension " + std::to_string(dim()));
  }
  require_same_layout(x, element, "oracle element");
  return do_eval(x, element);
}

Evaluation ConservativeOracle::eval(const BlockedVector& x) const {
  Evaluation e{0.0, BlockedVector(layout_)};
  e.value = eval(x, e.element);
  return e;
}

double ConservativeOracle::value(const BlockedVector& x) const {
  if (!(x.layout() == *layout_)) throw DimensionError("oracle: dimension mismatch");
  return do_value(x);
}

double ConservativeOracle::do_value(const BlockedVector& x) const {
  BlockedVector scratch(layout_);
  return do_eval(x, scratch);
}

// ---- Components ------------------------------------------------------------

AbsResidualOracle::AbsResidualOracle(std::vector<double> a, double b)
    : ConservativeOracle(make_layout({a.size()})), a_(std::move(a)), b_(b) {}

double AbsResidualOracle::do_eval(const BlockedVector& x, BlockedVector& element) const {
  const double r = simd::active().dot(a_.data(), x.data(), a_.size()) - b_;
  simd::active().scale(element.data(), sign_or_zero(r), a_.data(), a_.size());
  return std::fabs(r);
}

QuadraticOracle::QuadraticOracle(std::vector<double> center)
    : ConservativeOracle(make_layout({center.size()})), center_(std::move(center)) {}

double QuadraticOracle::do_eval(const BlockedVector& x, BlockedVector& element) const {
  simd::active().sub(element.data(), x.data(), center_.data(), center_.size());
  return 0.5 * simd::active().sum_sq(element.data(), center_.size());
}

NonregularScalarOracle::NonregularScalarOracle() : ConservativeOracle(make_layout({1})) {}

double NonregularScalarOracle::do_eval(const BlockedVector& x, BlockedVector& element) const {
  const double v = x[0];
  element[0] = 2.0 * v - sign_or_zero(v);
  return v * v - std::fabs(v) + 1.0;
}

ReluNetOracle::ReluNetOracle(std::size_t d_in, std::size_t d_hidden, std::size_t d_out, std::vector<double> data)
    : ConservativeOracle(make_layout(d_in, d_hidden, d_out)),
      d_in_(d_in),
      d_hidden_(d_hidden),
      d_out_(d_out),
      data_(std::move(data)) {
  if (d_in == 0 || d_hidden == 0 || d_out == 0) throw std::invalid_argument("relu_net: dimensions must be positive");
  if (data_.size() != d_in) {
    throw DimensionError("relu_net: data vector has " + std::to_string(data_.size()) + " entries, d_in is " +
                         std::to_string(d_in));
  }
}

LayoutPtr ReluNetOracle::make_layout(std::size_t d_in, std::size_t d_hidden, std::size_t d_out) {
  return bregsub::make_layout({d_hidden * d_in, d_out * d_hidden}, {"W1", "W2"});
}

double ReluNetOracle::do_eval(const BlockedVector& w, BlockedVector& element) const {
  const auto w1 = w.block(0);
  const auto w2 = w.block(1);
  auto g1 = element.block(0);
  auto g2 = element.block(1);

  std::vector<double> pre(d_hidden_), act(d_hidden_), out(d_out_), back(d_hidden_, 0.0);
  for (std::size_t h = 0; h < d_hidden_; ++h) {
    double z = 0.0;
    for (std::size_t j = 0; j < d_in_; ++j) z += w1[h * d_in_ + j] * data_[j];
    pre[h] = z;
    act[h] = z > 0.0 ? z : 0.0;
  }
  double f = 0.0;
  for (std::size_t o = 0; o < d_out_; ++o) {
    double s = 0.0;
    for (std::size_t h = 0; h < d_hidden_; ++h) s += w2[o * d_hidden_ + h] * act[h];
    out[o] = s;
    f += s * s;
  }
  for (std::size_t o = 0; o < d_out_; ++o) {
    for (std::size_t h = 0; h < d_hidden_; ++h) {
      back[h] += w2[o * d_hidden_ + h] * out[o];
      g2[o * d_hidden_ + h] = out[o] * act[h];
    }
  }
  for (std::size_t h = 0; h < d_hidden_; ++h) {
    const double gate = pre[h] > 0.0 ? back[h] : 0.0;
    for (std::size_t j = 0; j < d_in_; ++j) g1[h * d_in_ + j] = gate * data_[j];
  }
  return 0.5 * f;
}

// ---- FiniteSumObjective ----------------------------------------------------

FiniteSumObjective::FiniteSumObjective(std::vector<std::shared_ptr<const ConservativeOracle>> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("FiniteSumObjective: need at least one component");
  layout_ = components_.front()->layout();
  for (const auto& c : components_) {
    if (!(*c->layout() == *layout_)) throw DimensionError("FiniteSumObjective: components disagree on layout");
  }
}

const ConservativeOracle& FiniteSumObjective::component(std::size_t i) const {
  if (i >= components_.size()) {
    throw std::out_of_range("component index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(components_.size()) + ")");
  }
  return *components_[i];
}

double FiniteSumObjective::eval_component(std::size_t i, const BlockedVector& x, BlockedVector& element) const {
  return component(i).eval(x, element);
}

Evaluation FiniteSumObjective::eval_component(std::size_t i, const BlockedVector& x) const {
  return component(i).eval(x);
}

double FiniteSumObjective::eval_full(const BlockedVector& x, BlockedVector& element) const {
  require_same_layout(x, element, "eval_full");
  BlockedVector scratch(layout_);
  element.set_zero();
  double total = 0.0;
  for (const auto& c : components_) {
    total += c->eval(x, scratch);
    axpy(1.0, scratch, element);
  }
  const double inv = 1.0 / static_cast<double>(components_.size());
  scale_in_place(element, inv);
  return total * inv;
}

Evaluation FiniteSumObjective::eval_full(const BlockedVector& x) const {
  Evaluation e{0.0, BlockedVector(layout_)};
  e.value = eval_full(x, e.element);
  return e;
}

double FiniteSumObjective::value(const BlockedVector& x) const {
  double total = 0.0;
  for (const auto& c : components_) total += c->value(x);
  return total / static_cast<double>(components_.size());
}

BlockedVector FiniteSumObjective::noise(std::size_t i, const BlockedVector& x) const {
  Evaluation comp = eval_component(i, x);
  const Evaluation full = eval_full(x);
  subtract(comp.element, comp.element, full.element);
  return std::move(comp.element);
}

// ---- Sampler ---------------------------------------------------------------

std::string_view to_string(SamplingMode mode) {
  switch (mode) {
    case SamplingMode::iid:
      return "iid";
    case SamplingMode::reshuffle:
      return "reshuffle";
    case SamplingMode::full:
      return "full";
  }
  return "unknown";
}

SamplingMode sampling_mode_from_string(std::string_view name) {
  for (SamplingMode m : {SamplingMode::iid, SamplingMode::reshuffle, SamplingMode::full}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown sampler mode '" + std::string(name) + "'");
}

Sampler::Sampler(SamplingMode mode, std::size_t n, std::uint64_t seed, std::size_t batch_size)
    : mode_(mode), n_(n), batch_(batch_size), rng_(seed) {
  if (n_ == 0) throw std::invalid_argument("Sampler: N must be >= 1");
  if (batch_ == 0) throw std::invalid_argument("Sampler: batch_size must be >= 1");
  if (mode_ == SamplingMode::reshuffle) {
    perm_.resize(n_);
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  }
}

std::size_t Sampler::steps_per_epoch() const {
  switch (mode_) {
    case SamplingMode::reshuffle:
      return n_;
    case SamplingMode::iid:
      return (n_ + batch_ - 1) / batch_;
    case SamplingMode::full:
      return 1;
  }
  return 1;
}

std::size_t Sampler::next_index() {
  switch (mode_) {
    case SamplingMode::iid: {
      ++draws_;
      return static_cast<std::size_t>(rng_.uniform_index(n_));
    }
    case SamplingMode::reshuffle: {
      const std::size_t pos = static_cast<std::size_t>(draws_ % n_);
      if (pos == 0) {
        for (std::size_t i = n_ - 1; i > 0; --i) {
          const auto j = static_cast<std::size_t>(rng_.uniform_index(i + 1));
          std::swap(perm_[i], perm_[j]);
        }
      }
      ++draws_;
      return perm_[pos];
    }
    case SamplingMode::full:
      break;
  }
  throw std::logic_error("Sampler::next_index called in full mode");
}

// ---- Noise diagnostics -----------------------------------------------------

double noise_window_sup(std::span<const double> etas, std::span<const BlockedVector> xis, double horizon,
                        std::size_t start) {
  if (etas.size() != xis.size()) throw std::invalid_argument("noise_window_sup: etas and xis differ in length");
  if (start >= etas.size()) throw std::invalid_argument("noise_window_sup: start beyond the run");
  BlockedVector partial = xis[start].zeros_like();
  double best = 0.0;
  double elapsed = 0.0;  // lambda(i) - lambda(start)
  for (std::size_t i = start; i < etas.size(); ++i) {
    if (elapsed > horizon) break;
    axpy(etas[i], xis[i], partial);
    best = std::max(best, norm(partial));
    elapsed += etas[i];
  }
  return best;
}

double noise_partial_sum_check(std::span<const double> etas, std::span<const BlockedVector> xis, double horizon) {
  if (etas.empty() || xis.empty()) throw std::invalid_argument("noise_partial_sum_check: empty input");
  if (etas.size() != xis.size()) {
    throw std::invalid_argument("noise_partial_sum_check: etas and xis differ in length");
  }
  double worst = 0.0;
  for (std::size_t s = etas.size() / 2; s < etas.size(); ++s) {
    worst = std::max(worst, noise_window_sup(etas, xis, horizon, s));
  }
  return worst;
}

double epoch_drift_delta(std::span<const double> step_norms, std::size_t n) {
  double sum = 0.0;
  for (double s : step_norms) sum += s;
  return 2.0 * static_cast<double>(n) * sum;
}

}  // namespace bregsub
