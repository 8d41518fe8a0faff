// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#include "bregsub/prox.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bregsub/error.hpp"
#include "bregsub/simd.hpp"

namespace bregsub {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDecreaseRelTol = 1e-12;
constexpr int kRootPasses = 4;

// Tightest useful per-coordinate root tolerance relative to (1 + s).
constexpr double kRootTolFloor = 1e-16;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

Interval subdifferential_interval(const Regularizer& r, double v) {
  if (r.is_zero()) return {};
  if (v > 0.0) return {r.lambda, r.lambda};
  if (v < 0.0) return {-r.lambda, -r.lambda};
  return {-r.lambda, r.lambda};
}

Interval normal_cone_interval(const ConstraintSet& c, double v) {
  const bool at_lower = std::isfinite(c.lower) && v <= c.lower;
  const bool at_upper = std::isfinite(c.upper) && v >= c.upper;
  if (at_lower && at_upper) return {-kInf, kInf};
  if (at_lower) return {-kInf, 0.0};
  if (at_upper) return {0.0, kInf};
  return {};
}

// Solves the separable subproblem with dual target y and L1 threshold t:
// u = clamp(grad_conj(soft(y, t))). Euclidean is closed form.
void solve_separable(const Kernel& kernel, const BlockedVector& y, double threshold, const ConstraintSet& c,
                     double root_tol, BlockedVector& u) {
  const auto& be = simd::active();
  const std::size_t n = y.total_dim();
  if (kernel.name() == "euclidean") {
    be.soft_clamp(u.data(), y.data(), threshold, c.lower, c.upper, n);
    return;
  }
  const auto& coord = dynamic_cast<const CoordPolynomialKernel&>(kernel);
  const auto& p = coord.params();
  be.soft_clamp(u.data(), y.data(), threshold, -kInf, kInf, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(n, 1)));
  for (std::size_t j = 0; j < n; ++j) {
    const double s = std::fabs(u[j]);
    if (s < kZeroBlockNorm) {
      u[j] = 0.0;
    } else {
      const double t = solve_radial(s, p.sigma, p.degree, root_tol * (1.0 + s) * scale, kernel.root_options().max_iter);
      u[j] = std::copysign(t, u[j]);
    }
  }
  be.soft_clamp(u.data(), u.data(), 0.0, c.lower, c.upper, n);
}

double decrease_scale(const Kernel& kernel, const BlockedVector& x, const BlockedVector& x_plus, double eta) {
  if (kernel.name() == "euclidean") return 0.0;
  return (std::fabs(kernel.value(x)) + std::fabs(kernel.value(x_plus))) / eta;
}

}  // namespace

Regularizer Regularizer::l1(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("l1 regularizer: lambda must be >= 0");
  return {RegularizerKind::l1, lambda};
}

double Regularizer::value(const BlockedVector& x) const {
  if (is_zero()) return 0.0;
  double s = 0.0;
  for (double v : x.flat()) s += std::fabs(v);
  return lambda * s;
}

Regularizer Regularizer::scaled(double factor) const { return {kind, lambda * factor}; }

ConstraintSet ConstraintSet::box(double lower, double upper) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw std::invalid_argument("box constraint: need lower <= upper");
  }
  return {ConstraintKind::box, lower, upper};
}

ConstraintSet ConstraintSet::nonneg() { return {ConstraintKind::nonneg, 0.0, kInf}; }

bool ConstraintSet::contains(const BlockedVector& x) const {
  return std::all_of(x.flat().begin(), x.flat().end(), [&](double v) { return v >= lower && v <= upper; });
}

void ConstraintSet::project(BlockedVector& x) const {
  simd::active().soft_clamp(x.data(), x.data(), 0.0, lower, upper, x.total_dim());
}

std::string_view to_string(RegularizerKind kind) { return kind == RegularizerKind::l1 ? "l1" : "zero"; }

std::string_view to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::whole_space:
      return "whole_space";
    case ConstraintKind::box:
      return "box";
    case ConstraintKind::nonneg:
      return "nonneg";
  }
  return "unknown";
}

RegularizerKind regularizer_kind_from_string(std::string_view name) {
  if (name == "zero") return RegularizerKind::zero;
  if (name == "l1") return RegularizerKind::l1;
  throw std::invalid_argument("unknown regularizer '" + std::string(name) + "'");
}

ConstraintKind constraint_kind_from_string(std::string_view name) {
  for (ConstraintKind k : {ConstraintKind::whole_space, ConstraintKind::box, ConstraintKind::nonneg}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown constraint '" + std::string(name) + "'");
}

void require_supported(const Kernel& kernel, const Regularizer& r, const ConstraintSet& x_set) {
  if (kernel.coordinate_separable()) return;
  if (r.is_zero() && x_set.kind == ConstraintKind::whole_space) return;
  throw UnsupportedError("kernel '" + kernel.name() +
                         "' couples coordinates within a block; composite subproblems with a regularizer or "
                         "constraint need a separable kernel (euclidean or coord_poly)");
}

BlockedVector subgradient_element(const Regularizer& r, const BlockedVector& x) {
  BlockedVector s = x.zeros_like();
  if (r.is_zero()) return s;
  for (std::size_t j = 0; j < x.total_dim(); ++j) {
    s[j] = x[j] > 0.0 ? r.lambda : (x[j] < 0.0 ? -r.lambda : 0.0);
  }
  return s;
}

double min_norm_residual(const BlockedVector& g, const BlockedVector& dual_step, const Regularizer& r,
                         const ConstraintSet& x_set, const BlockedVector& x_plus) {
  require_same_layout(g, dual_step, "min_norm_residual");
  require_same_layout(g, x_plus, "min_norm_residual");
  double sq = 0.0;
  for (std::size_t j = 0; j < g.total_dim(); ++j) {
    const double res = g[j] + dual_step[j];
    const Interval sr = subdifferential_interval(r, x_plus[j]);
    const Interval nc = normal_cone_interval(x_set, x_plus[j]);
    const double lo = sr.lo + nc.lo;
    const double hi = sr.hi + nc.hi;
    const double e = res + std::clamp(-res, lo, hi);
    sq += e * e;
  }
  return std::sqrt(sq);
}

ProxResult forward_backward(const Kernel& kernel, const Regularizer& r, const ConstraintSet& x_set,
                            const BlockedVector& x, const BlockedVector& g, double eta, double nu) {
  if (!(eta > 0.0)) throw std::invalid_argument("forward_backward: eta must be positive");
  require_same_layout(x, g, "forward_backward");
  require_supported(kernel, r, x_set);

  BlockedVector grad_x = kernel.grad(x);
  BlockedVector y = x.zeros_like();
  sub_scaled(y, grad_x, eta, g);

  ProxResult out{x.zeros_like(), {}};
  BlockedVector grad_plus = x.zeros_like();
  BlockedVector dual_step = x.zeros_like();
  const double r_x = r.value(x);
  double root_tol = kernel.root_options().tol;

  for (int pass = 0; pass < kRootPasses; ++pass) {
    if (kernel.coordinate_separable()) {
      solve_separable(kernel, y, eta * r.lambda * (r.is_zero() ? 0.0 : 1.0), x_set, root_tol, out.point);
    } else {
      kernel.grad_conj(y, out.point);
    }

    kernel.grad(out.point, grad_plus);
    subtract(dual_step, grad_plus, grad_x);
    scale_in_place(dual_step, 1.0 / eta);

    Certificate& cert = out.certificate;
    cert.nu = nu;
    cert.stationarity_residual = min_norm_residual(g, dual_step, r, x_set, out.point);
    const double lin = dot(g, out.point - x);
    const double breg = kernel.bregman(out.point, x) / eta;
    const double r_plus = r.value(out.point);
    cert.decrease_gap = lin + breg + r_plus - r_x;
    cert.decrease_tolerance = kDecreaseRelTol * (1.0 + std::fabs(lin) + std::fabs(breg) + r_plus + r_x +
                                                 decrease_scale(kernel, x, out.point, eta));
    cert.decrease_ok = cert.decrease_gap <= cert.decrease_tolerance;
    if (cert.ok()) return out;
    if (kernel.name() == "euclidean") break;  // closed form; tightening cannot help
    root_tol = std::max(root_tol * 1e-2, kRootTolFloor);
  }

  std::ostringstream msg;
  msg.precision(6);
  msg << "forward_backward: certificate failed (stationarity residual " << out.certificate.stationarity_residual
      << " vs nu " << nu << ", decrease gap " << out.certificate.decrease_gap << " vs tolerance "
      << out.certificate.decrease_tolerance << ")";
  throw CertificateError(msg.str());
}

ProxResult bregman_prox(const Kernel& kernel, const Regularizer& r, const BlockedVector& x, double eta, double nu) {
  if (!(eta > 0.0)) throw std::invalid_argument("bregman_prox: eta must be positive");
  // Same minimizer as forward_backward with g = 0; its residual is the prox
  // residual divided by eta.
  BlockedVector zero = x.zeros_like();
  ProxResult res = forward_backward(kernel, r, ConstraintSet::whole_space(), x, zero, eta, nu / eta);
  res.certificate.stationarity_residual *= eta;
  res.certificate.nu = nu;
  return res;
}

}  // namespace bregsub
