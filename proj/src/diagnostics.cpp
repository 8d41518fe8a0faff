// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#include "bregsub/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bregsub {

TimeAxis::TimeAxis(std::span<const double> etas) : lambdas_{0.0} {
  for (double e : etas) push(e);
}

void TimeAxis::push(double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("TimeAxis: step sizes must be positive");
  etas_.push_back(eta);
  lambdas_.push_back(lambdas_.back() + eta);
}

std::size_t TimeAxis::inverse(double t) const {
  if (!(t >= 0.0) || t > lambdas_.back()) throw std::out_of_range("TimeAxis: t outside [0, horizon]");
  const auto it = std::upper_bound(lambdas_.begin(), lambdas_.end(), t);
  return static_cast<std::size_t>(it - lambdas_.begin()) - 1;
}

void DualPath::record(std::size_t k, BlockedVector x, BlockedVector dual) {
  if (!iters_.empty() && k <= iters_.back()) throw std::invalid_argument("DualPath: records must be increasing");
  iters_.push_back(k);
  primals_.push_back(std::move(x));
  duals_.push_back(std::move(dual));
}

std::size_t DualPath::slot(std::size_t k) const {
  const auto it = std::lower_bound(iters_.begin(), iters_.end(), k);
  if (it == iters_.end() || *it != k) return iters_.size();
  return static_cast<std::size_t>(it - iters_.begin());
}

bool DualPath::has(std::size_t k) const { return slot(k) < iters_.size(); }

const BlockedVector& DualPath::primal(std::size_t k) const {
  const std::size_t s = slot(k);
  if (s == iters_.size()) throw std::out_of_range("DualPath: iterate " + std::to_string(k) + " not recorded");
  return primals_[s];
}

const BlockedVector& DualPath::dual(std::size_t k) const {
  const std::size_t s = slot(k);
  if (s == iters_.size()) throw std::out_of_range("DualPath: iterate " + std::to_string(k) + " not recorded");
  return duals_[s];
}

BlockedVector DualPath::interpolate(const Kernel& kernel, double t) const {
  const std::size_t k = axis_.inverse(t);
  const double offset = t - axis_.lambda(k);
  if (offset == 0.0 || k == axis_.steps()) {
    if (!has(k)) {
      throw std::invalid_argument("DualPath: iterate " + std::to_string(k) + " falls between strided samples");
    }
    return kernel.grad_conj(dual(k));
  }
  if (!has(k) || !has(k + 1)) {
    throw std::invalid_argument("DualPath: segment [" + std::to_string(k) + ", " + std::to_string(k + 1) +
                                "] is not fully recorded (stride " + std::to_string(stride_) + ")");
  }
  const BlockedVector& y0 = dual(k);
  const BlockedVector& y1 = dual(k + 1);
  BlockedVector y = y0;
  axpy(offset / axis_.eta(k), y1 - y0, y);
  return kernel.grad_conj(y);
}

double lyapunov_msbg(double f_value, const BlockedVector& m, double tau) {
  return lyapunov_msbg(f_value, norm(m), tau);
}

double lyapunov_msbg(double f_value, double m_norm, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("lyapunov_msbg: tau must be positive");
  return f_value + m_norm * m_norm / (2.0 * tau);
}

double stationarity_proxy(std::span<const BlockedVector> recent_elements) {
  if (recent_elements.empty()) throw std::invalid_argument("stationarity_proxy: empty window");
  BlockedVector sum = recent_elements.front().zeros_like();
  for (const auto& e : recent_elements) axpy(1.0, e, sum);
  return norm(sum) / static_cast<double>(recent_elements.size());
}

void ElementWindow::push(const BlockedVector& element) {
  if (items_.size() < capacity_) {
    items_.push_back(element);
  } else {
    items_[next_] = element;
  }
  next_ = (next_ + 1) % capacity_;
}

double ElementWindow::proxy() const { return stationarity_proxy(items_); }

std::vector<double> dual_increment_norms(std::span<const TraceRecord> trace) {
  std::vector<double> out;
  out.reserve(trace.size());
  for (const auto& r : trace) {
    if (r.iter == 0) continue;
    out.push_back(r.eta * r.dual_step_norm);
  }
  return out;
}

double trailing_oscillation(std::span<const double> values, double fraction) {
  if (values.empty()) return 0.0;
  const auto count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(values.size()))));
  const auto tail = values.subspan(values.size() - std::min(count, values.size()));
  const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  return *hi - *lo;
}

DualIncrementSummary summarize_dual_increments(std::span<const TraceRecord> trace, double threshold,
                                               double tail_fraction) {
  const std::vector<double> inc = dual_increment_norms(trace);
  DualIncrementSummary s;
  s.threshold = threshold;
  if (inc.empty()) return s;
  const auto count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(inc.size()))));
  s.tail_max = *std::max_element(inc.end() - static_cast<std::ptrdiff_t>(std::min(count, inc.size())), inc.end());
  s.below_threshold = s.tail_max <= threshold;
  return s;
}

TraceReport diagnose_trace(std::span<const TraceRecord> trace, double increment_threshold) {
  TraceReport rep;
  rep.rows = trace.size();
  if (trace.empty()) return rep;
  rep.last_iter = trace.back().iter;
  rep.final_f = trace.back().f_value;
  rep.best_f = trace.front().f_value;
  rep.final_m_norm = trace.back().m_norm;
  rep.final_stationarity_proxy = trace.back().stationarity_proxy;

  std::vector<double> f;
  std::vector<double> h;
  for (const auto& r : trace) {
    f.push_back(r.f_value);
    rep.best_f = std::min(rep.best_f, r.f_value);
    rep.max_cert_residual = std::max(rep.max_cert_residual, r.cert_residual);
    if (r.theta > 0.0 && r.eta > 0.0) {
      const double tau = r.theta / r.eta;
      if (!rep.tau_first) rep.tau_first = tau;
      rep.tau_last = tau;
      h.push_back(lyapunov_msbg(r.f_value, r.m_norm, tau));
    }
  }
  rep.f_trailing_oscillation = trailing_oscillation(f);
  if (!h.empty()) rep.lyapunov_trailing_oscillation = trailing_oscillation(h);
  rep.dual_increments = summarize_dual_increments(trace, increment_threshold);
  return rep;
}

std::string format_report(const TraceReport& r) {
  std::ostringstream o;
  o.precision(10);
  o << "rows: " << r.rows << '\n';
  o << "last_iter: " << r.last_iter << '\n';
  o << "final_f: " << r.final_f << '\n';
  o << "best_f: " << r.best_f << '\n';
  o << "f_trailing_oscillation_10pct: " << r.f_trailing_oscillation << '\n';
  if (r.lyapunov_trailing_oscillation) {
    o << "lyapunov_trailing_oscillation_10pct: " << *r.lyapunov_trailing_oscillation << '\n';
    o << "theta_over_eta_first: " << *r.tau_first << '\n';
    o << "theta_over_eta_last: " << *r.tau_last << '\n';
  }
  o << "final_m_norm: " << r.final_m_norm << '\n';
  o << "final_stationarity_proxy: " << r.final_stationarity_proxy
    << "  # window-averaged element norm; a proxy, not a certified dist(0, D_f(x))\n";
  o << "max_cert_residual: " << r.max_cert_residual << '\n';
  o << "dual_increment_tail_max: " << r.dual_increments.tail_max << '\n';
  o << "dual_increment_threshold: " << r.dual_increments.threshold << '\n';
  o << "dual_increment_below_threshold: " << (r.dual_increments.below_threshold ? "yes" : "no") << '\n';
  return o.str();
}

}  // namespace bregsub
