// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <limits>
#include <string_view>

#include "bregsub/blocked_vector.hpp"
#include "bregsub/kernel.hpp"

namespace bregsub {

enum class RegularizerKind { zero, l1 };

// Convex separable regularizer R; its conservative field is the convex
// subdifferential.
struct Regularizer {
  RegularizerKind kind = RegularizerKind::zero;
  double lambda = 0.0;

  static Regularizer none() { return {}; }
  static Regularizer l1(double lambda);

  bool is_zero() const { return kind == RegularizerKind::zero || lambda == 0.0; }
  double value(const BlockedVector& x) const;
  // Same regularizer with lambda multiplied by `factor`.
  Regularizer scaled(double factor) const;

  bool operator==(const Regularizer&) const = default;
};

enum class ConstraintKind { whole_space, box, nonneg };

// Axis-aligned closed set: R^n, [lower, upper]^n or the nonnegative orthant.
struct ConstraintSet {
  ConstraintKind kind = ConstraintKind::whole_space;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  static ConstraintSet whole_space() { return {}; }
  static ConstraintSet box(double lower, double upper);
  static ConstraintSet nonneg();

  bool contains(const BlockedVector& x) const;
  void project(BlockedVector& x) const;

  bool operator==(const ConstraintSet&) const = default;
};

std::string_view to_string(RegularizerKind kind);
std::string_view to_string(ConstraintKind kind);
RegularizerKind regularizer_kind_from_string(std::string_view name);
ConstraintKind constraint_kind_from_string(std::string_view name);

// Outcome of the two subproblem acceptance tests.
struct Certificate {
  // dist(0, g + (grad phi(x+) - grad phi(x)) / eta + dR(x+) + N_X(x+)).
  double stationarity_residual = 0.0;
  // lhs - rhs of <g, x+ - x> + D(x+, x) / eta + R(x+) <= R(x); <= tolerance when ok.
  double decrease_gap = 0.0;
  double decrease_tolerance = 0.0;
  bool decrease_ok = true;
  double nu = 0.0;

  bool ok() const { return decrease_ok && stationarity_residual <= nu; }
};

struct ProxResult {
  BlockedVector point;
  Certificate certificate;
};

// Throws UnsupportedError unless the subproblem has a certified solver:
// separable kernels with any supported R and X, block kernels only with
// R = 0 and X = R^n.
void require_supported(const Kernel& kernel, const Regularizer& r, const ConstraintSet& x_set);

// Deterministic element of dR(x): lambda * sign(x) with sign(0) = 0.
BlockedVector subgradient_element(const Regularizer& r, const BlockedVector& x);

// Exact dist(0, g + dual_step + dR(x+) + N_X(x+)) for separable R and box X,
// coordinate by coordinate.
double min_norm_residual(const BlockedVector& g, const BlockedVector& dual_step, const Regularizer& r,
                         const ConstraintSet& x_set, const BlockedVector& x_plus);

// argmin_u { eta R(u) + D(u, x) }, certified with
// dist(0, eta dR(u) + grad phi(u) - grad phi(x)) <= nu.
ProxResult bregman_prox(const Kernel& kernel, const Regularizer& r, const BlockedVector& x, double eta, double nu);

// argmin_{u in X} { <g, u - x> + D(u, x) / eta + R(u) } for x in X (the
// decrease certificate compares against x).
//
// Separable kernels: u_j = clamp((psi')^{-1}(soft(psi'(x_j) - eta g_j, eta lambda)), lo, hi),
// closed form for the Euclidean kernel, monotone root solves otherwise. The
// root tolerance is tightened until both certificates hold; failure after
// the last pass throws CertificateError. The result is always feasible.
ProxResult forward_backward(const Kernel& kernel, const Regularizer& r, const ConstraintSet& x_set,
                            const BlockedVector& x, const BlockedVector& g, double eta, double nu);

}  // namespace bregsub
