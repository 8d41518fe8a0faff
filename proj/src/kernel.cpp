// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#include "bregsub/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bregsub/error.hpp"
#include "bregsub/simd.hpp"

namespace bregsub {
namespace {

double ipow(double base, int exponent) {
  double acc = 1.0;
  for (int i = 0; i < exponent; ++i) acc *= base;
  return acc;
}

// ||x||^p from ||x||^2, avoiding a sqrt round trip for even p.
double norm_pow(double t2, int p) {
  if (p % 2 == 0) return ipow(t2, p / 2);
  return ipow(std::sqrt(t2), p);
}

double piece_tol(const RootSolverOptions& o, double s, std::size_t pieces) {
  return o.tol * (1.0 + s) / std::sqrt(static_cast<double>(std::max<std::size_t>(pieces, 1)));
}

}  // namespace

double solve_radial(double s, double sigma, int degree, double tol, int max_iter) {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("solve_radial: target must be finite and nonnegative");
  }
  if (s == 0.0) return 0.0;
  if (sigma == 0.0) return s;

  const auto residual = [&](double t) { return t + sigma * ipow(t, degree - 1) - s; };

  double lo = 0.0;
  double hi = s;  // t(1 + sigma t^(r-2)) >= t, so the root is <= s
  double t = std::min(s, std::pow(s / sigma, 1.0 / (degree - 1)));
  double q = residual(t);
  for (int it = 0; it < max_iter; ++it) {
    if (std::fabs(q) <= tol) return t;
    if (q > 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    const double dq = 1.0 + (degree - 1) * sigma * ipow(t, degree - 2);
    double next = t - q / dq;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == t) break;
    t = next;
    q = residual(t);
  }
  if (std::fabs(q) <= tol) return t;
  std::ostringstream msg;
  msg.precision(17);
  msg << "solve_radial: no convergence for s=" << s << " sigma=" << sigma << " degree=" << degree
      << " (residual " << q << " > tol " << tol << ")";
  throw ConvergenceError(msg.str());
}

void validate(const PolyParams& p) {
  if (!std::isfinite(p.sigma) || p.sigma < 0.0) {
    throw std::invalid_argument("polynomial kernel: sigma must be finite and >= 0");
  }
  if (p.degree < 4) throw std::invalid_argument("polynomial kernel: degree must be an integer >= 4");
}

// ---- Kernel (public checks) ------------------------------------------------

void Kernel::check(const BlockedVector& x, const char* where) const {
  if (!layout_) return;
  if (!(*layout_ == x.layout())) {
    std::ostringstream msg;
    msg << name() << "." << where << ": operand of dimension " << x.total_dim() << " in " << x.num_blocks()
        << " blocks, kernel configured for dimension " << layout_->total_dim() << " in "
        << layout_->num_blocks() << " blocks";
    throw DimensionError(msg.str());
  }
}

double Kernel::value(const BlockedVector& x) const {
  check(x, "value");
  return do_value(x);
}

void Kernel::grad(const BlockedVector& x, BlockedVector& out) const {
  check(x, "grad");
  require_same_layout(x, out, "Kernel::grad");
  do_grad(x, out);
}

BlockedVector Kernel::grad(const BlockedVector& x) const {
  BlockedVector out = x.zeros_like();
  grad(x, out);
  return out;
}

void Kernel::grad_conj(const BlockedVector& y, BlockedVector& out) const {
  check(y, "grad_conj");
  require_same_layout(y, out, "Kernel::grad_conj");
  do_grad_conj(y, out);
}

BlockedVector Kernel::grad_conj(const BlockedVector& y) const {
  BlockedVector out = y.zeros_like();
  grad_conj(y, out);
  return out;
}

double Kernel::bregman(const BlockedVector& x, const BlockedVector& y) const {
  check(x, "bregman");
  require_same_layout(x, y, "Kernel::bregman");
  return do_bregman(x, y);
}

double Kernel::do_bregman(const BlockedVector& x, const BlockedVector& y) const {
  const BlockedVector gy = grad(y);
  return do_value(x) - do_value(y) - dot(gy, x - y);
}

void Kernel::hessian_apply(const BlockedVector& x, const BlockedVector& v, BlockedVector& out) const {
  check(x, "hessian_apply");
  require_same_layout(x, v, "Kernel::hessian_apply");
  require_same_layout(x, out, "Kernel::hessian_apply");
  do_hessian_apply(x, v, out);
}

BlockedVector Kernel::hessian_apply(const BlockedVector& x, const BlockedVector& v) const {
  BlockedVector out = v.zeros_like();
  hessian_apply(x, v, out);
  return out;
}

void Kernel::inv_hessian_apply(const BlockedVector& x, const BlockedVector& v, BlockedVector& out) const {
  check(x, "inv_hessian_apply");
  require_same_layout(x, v, "Kernel::inv_hessian_apply");
  require_same_layout(x, out, "Kernel::inv_hessian_apply");
  do_inv_hessian_apply(x, v, out);
}

BlockedVector Kernel::inv_hessian_apply(const BlockedVector& x, const BlockedVector& v) const {
  BlockedVector out = v.zeros_like();
  inv_hessian_apply(x, v, out);
  return out;
}

// ---- Euclidean -------------------------------------------------------------

double EuclideanKernel::do_value(const BlockedVector& x) const { return 0.5 * squared_norm(x); }

void EuclideanKernel::do_grad(const BlockedVector& x, BlockedVector& out) const {
  if (&out != &x) std::copy(x.flat().begin(), x.flat().end(), out.flat().begin());
}

void EuclideanKernel::do_grad_conj(const BlockedVector& y, BlockedVector& out) const {
  if (&out != &y) std::copy(y.flat().begin(), y.flat().end(), out.flat().begin());
}

double EuclideanKernel::do_bregman(const BlockedVector& x, const BlockedVector& y) const {
  return 0.5 * squared_norm(x - y);
}

void EuclideanKernel::do_hessian_apply(const BlockedVector&, const BlockedVector& v, BlockedVector& out) const {
  if (&out != &v) std::copy(v.flat().begin(), v.flat().end(), out.flat().begin());
}

void EuclideanKernel::do_inv_hessian_apply(const BlockedVector&, const BlockedVector& v,
                                           BlockedVector& out) const {
  if (&out != &v) std::copy(v.flat().begin(), v.flat().end(), out.flat().begin());
}

// ---- Block polynomial ------------------------------------------------------

BlockPolynomialKernel::BlockPolynomialKernel(PolyParams shared, LayoutPtr layout, RootSolverOptions root)
    : Kernel(std::move(layout), root), params_{shared} {
  validate(shared);
}

BlockPolynomialKernel::BlockPolynomialKernel(std::vector<PolyParams> per_block, LayoutPtr layout,
                                             RootSolverOptions root)
    : Kernel(std::move(layout), root), params_(std::move(per_block)) {
  if (!bound_layout()) throw std::invalid_argument("block_poly: per-block parameters need a layout");
  if (params_.size() != bound_layout()->num_blocks()) {
    throw DimensionError("block_poly: " + std::to_string(params_.size()) + " parameter pairs for " +
                         std::to_string(bound_layout()->num_blocks()) + " blocks");
  }
  for (const auto& p : params_) validate(p);
}

const PolyParams& BlockPolynomialKernel::params(std::size_t block) const {
  return params_.size() == 1 ? params_.front() : params_.at(block);
}

double BlockPolynomialKernel::do_value(const BlockedVector& x) const {
  const auto& be = simd::active();
  double v = 0.0;
  for (std::size_t i = 0; i < x.num_blocks(); ++i) {
    const auto& p = params(i);
    const auto b = x.block(i);
    const double t2 = be.sum_sq(b.data(), b.size());
    v += 0.5 * t2 + (p.sigma / p.degree) * norm_pow(t2, p.degree);
  }
  return v;
}

void BlockPolynomialKernel::do_grad(const BlockedVector& x, BlockedVector& out) const {
  const auto& be = simd::active();
  for (std::size_t i = 0; i < x.num_blocks(); ++i) {
    const auto& p = params(i);
    const auto b = x.block(i);
    const double t2 = be.sum_sq(b.data(), b.size());
    const double factor = 1.0 + p.sigma * norm_pow(t2, p.degree - 2);
    be.scale(out.block(i).data(), factor, b.data(), b.size());
  }
}

void BlockPolynomialKernel::do_grad_conj(const BlockedVector& y, BlockedVector& out) const {
  const auto& be = simd::active();
  const auto& opts = root_options();
  for (std::size_t i = 0; i < y.num_blocks(); ++i) {
    const auto& p = params(i);
    const auto b = y.block(i);
    auto o = out.block(i);
    const double s = std::sqrt(be.sum_sq(b.data(), b.size()));
    if (s < kZeroBlockNorm) {
      std::fill(o.begin(), o.end(), 0.0);
      continue;
    }
    const double t = solve_radial(s, p.sigma, p.degree, piece_tol(opts, s, y.num_blocks()), opts.max_iter);
    be.scale(o.data(), t / s, b.data(), b.size());
  }
}

double BlockPolynomialKernel::do_bregman(const BlockedVector& x, const BlockedVector& y) const {
  // Per block: 1/2||x-y||^2 + (sigma/r)(||x||^r - ||y||^r) - sigma ||y||^(r-2) <y, x-y>
  const auto& be = simd::active();
  double d = 0.0;
  for (std::size_t i = 0; i < x.num_blocks(); ++i) {
    const auto& p = params(i);
    const auto xb = x.block(i);
    const auto yb = y.block(i);
    const double tx2 = be.sum_sq(xb.data(), xb.size());
    const double ty2 = be.sum_sq(yb.data(), yb.size());
    double diff2 = 0.0;
    double ydiff = 0.0;
    for (std::size_t j = 0; j < xb.size(); ++j) {
      const double dj = xb[j] - yb[j];
      diff2 += dj * dj;
      ydiff += yb[j] * dj;
    }
    d += 0.5 * diff2 + (p.sigma / p.degree) * (norm_pow(tx2, p.degree) - norm_pow(ty2, p.degree)) -
         p.sigma * norm_pow(ty2, p.degree - 2) * ydiff;
  }
  return d;
}

void BlockPolynomialKernel::do_hessian_apply(const BlockedVector& x, const BlockedVector& v,
                                             BlockedVector& out) const {
  const auto& be = simd::active();
  for (std::size_t i = 0; i < x.num_blocks(); ++i) {
    const auto& p = params(i);
    const auto xb = x.block(i);
    const auto vb = v.block(i);
    auto ob = out.block(i);
    const double t2 = be.sum_sq(xb.data(), xb.size());
    const double a = 1.0 + p.sigma * norm_pow(t2, p.degree - 2);
    const double b = p.sigma * (p.degree - 2) * norm_pow(t2, p.degree - 4);
    const double coef = b * be.dot(xb.data(), vb.data(), xb.size());
    be.scale(ob.data(), a, vb.data(), vb.size());
    be.axpy(ob.data(), coef, xb.data(), xb.size());
  }
}

void BlockPolynomialKernel::do_inv_hessian_apply(const BlockedVector& x, const BlockedVector& v,
                                                 BlockedVector& out) const {
  const auto& be = simd::active();
  for (std::size_t i = 0; i < x.num_blocks(); ++i) {
    const auto& p = params(i);
    const auto xb = x.block(i);
    const auto vb = v.block(i);
    auto ob = out.block(i);
    const double t2 = be.sum_sq(xb.data(), xb.size());
    const double a = 1.0 + p.sigma * norm_pow(t2, p.degree - 2);
    const double b = p.sigma * (p.degree - 2) * norm_pow(t2, p.degree - 4);
    const double coef = -b * be.dot(xb.data(), vb.data(), xb.size()) / (a * (a + b * t2));
    be.scale(ob.data(), 1.0 / a, vb.data(), vb.size());
    be.axpy(ob.data(), coef, xb.data(), xb.size());
  }
}

// ---- Coordinatewise polynomial ---------------------------------------------

CoordPolynomialKernel::CoordPolynomialKernel(PolyParams params, LayoutPtr layout, RootSolverOptions root)
    : Kernel(std::move(layout), root), params_(params) {
  validate(params_);
}

double CoordPolynomialKernel::do_value(const BlockedVector& x) const {
  double v = 0.0;
  for (double xj : x.flat()) {
    const double a = std::fabs(xj);
    v += 0.5 * a * a + (params_.sigma / params_.degree) * ipow(a, params_.degree);
  }
  return v;
}

void CoordPolynomialKernel::do_grad(const BlockedVector& x, BlockedVector& out) const {
  const auto& be = simd::active();
  std::vector<double> w(x.total_dim());
  be.poly_weight(w.data(), x.data(), params_.sigma, params_.degree - 2, w.size());
  be.mul(out.data(), x.data(), w.data(), w.size());
}

void CoordPolynomialKernel::do_grad_conj(const BlockedVector& y, BlockedVector& out) const {
  const auto& opts = root_options();
  const std::size_t n = y.total_dim();
  for (std::size_t j = 0; j < n; ++j) {
    const double s = std::fabs(y[j]);
    if (s < kZeroBlockNorm) {
      out[j] = 0.0;
      continue;
    }
    const double t = solve_radial(s, params_.sigma, params_.degree, piece_tol(opts, s, n), opts.max_iter);
    out[j] = std::copysign(t, y[j]);
  }
}

void CoordPolynomialKernel::do_hessian_apply(const BlockedVector& x, const BlockedVector& v,
                                             BlockedVector& out) const {
  const auto& be = simd::active();
  std::vector<double> h(x.total_dim());
  be.poly_weight(h.data(), x.data(), (params_.degree - 1) * params_.sigma, params_.degree - 2, h.size());
  be.mul(out.data(), v.data(), h.data(), h.size());
}

void CoordPolynomialKernel::do_inv_hessian_apply(const BlockedVector& x, const BlockedVector& v,
                                                 BlockedVector& out) const {
  const auto& be = simd::active();
  std::vector<double> h(x.total_dim());
  be.poly_weight(h.data(), x.data(), (params_.degree - 1) * params_.sigma, params_.degree - 2, h.size());
  be.div(out.data(), v.data(), h.data(), h.size());
}

// ---- Factory ---------------------------------------------------------------

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::euclidean:
      return "euclidean";
    case KernelKind::block_poly:
      return "block_poly";
    case KernelKind::coord_poly:
      return "coord_poly";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(std::string_view name) {
  for (KernelKind k : {KernelKind::euclidean, KernelKind::block_poly, KernelKind::coord_poly}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown kernel kind '" + std::string(name) + "'");
}

std::unique_ptr<Kernel> make_kernel(const KernelSpec& spec, LayoutPtr layout) {
  switch (spec.kind) {
    case KernelKind::euclidean:
      return std::make_unique<EuclideanKernel>(std::move(layout));
    case KernelKind::block_poly:
      return std::make_unique<BlockPolynomialKernel>(PolyParams{spec.sigma, spec.degree}, std::move(layout));
    case KernelKind::coord_poly:
      return std::make_unique<CoordPolynomialKernel>(PolyParams{spec.sigma, spec.degree}, std::move(layout));
  }
  throw std::invalid_argument("make_kernel: bad kind");
}

}  // namespace bregsub
