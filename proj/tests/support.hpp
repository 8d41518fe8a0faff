// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference computations shared by the unit and acceptance tests.
// Nothing here calls the kernel, prox or optimizer code under test.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <vector>

#include "bregsub/blocked_vector.hpp"
#include "bregsub/oracle.hpp"
#include "bregsub/rng.hpp"

namespace bregsub::testing {

inline BlockedVector random_vector(const LayoutPtr& layout, Rng& rng, double scale = 1.0) {
  BlockedVector v(layout);
  for (double& x : v.flat()) x = scale * rng.normal();
  return v;
}

inline bool bitwise_equal(const BlockedVector& a, const BlockedVector& b) {
  return a.total_dim() == b.total_dim() && std::memcmp(a.data(), b.data(), a.total_dim() * sizeof(double)) == 0;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

// Central differences of a scalar function.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double keep = x[j];
    x[j] = keep + h;
    const double up = f(x);
    x[j] = keep - h;
    const double down = f(x);
    x[j] = keep;
    g[j] = (up - down) / (2.0 * h);
  }
  return g;
}

// Jacobian of a vector map by central differences, column j = d map / d x_j.
inline Eigen::MatrixXd fd_jacobian(const std::function<std::vector<double>(const std::vector<double>&)>& map,
                                   std::vector<double> x, double h) {
  const std::size_t n = x.size();
  Eigen::MatrixXd J(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double keep = x[j];
    x[j] = keep + h;
    const auto up = map(x);
    x[j] = keep - h;
    const auto down = map(x);
    x[j] = keep;
    for (std::size_t i = 0; i < n; ++i) J(i, j) = (up[i] - down[i]) / (2.0 * h);
  }
  return J;
}

// Positive root t of t + sigma t^(r-1) = s by plain bisection on [0, s].
inline double bisect_radial(double s, double sigma, int r) {
  if (s <= 0.0) return 0.0;
  double lo = 0.0, hi = s;
  for (int it = 0; it < 2000 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double v = mid + sigma * std::pow(mid, r - 1);
    (v < s ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Block polynomial Hessian assembled densely from its textbook form
// d^2/dx^2 [t^2/2 + (sigma/r) t^r] = (1 + sigma t^(r-2)) I + sigma (r-2) t^(r-4) x x^T.
inline Eigen::MatrixXd dense_block_poly_hessian(std::span<const double> x, double sigma, int r) {
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = x[static_cast<std::size_t>(i)];
  const double t = v.norm();
  Eigen::MatrixXd H = (1.0 + sigma * std::pow(t, r - 2)) * Eigen::MatrixXd::Identity(n, n);
  if (t > 0.0) H += sigma * (r - 2) * std::pow(t, r - 4) * v * v.transpose();
  return H;
}

inline std::vector<double> dense_solve(const Eigen::MatrixXd& H, std::span<const double> v) {
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) rhs(static_cast<Eigen::Index>(i)) = v[i];
  const Eigen::VectorXd w = H.partialPivLu().solve(rhs);
  return {w.data(), w.data() + w.size()};
}

// ---- Straight-line reference loops (plain arrays, textbook updates) ---------
//
// Element draws reuse the library sampler and oracles so both sides see the
// same g_k; the update arithmetic is written out independently.

struct ReferenceRun {
  std::vector<std::vector<double>> iterates;  // x_0 .. x_K
};

using StepSize = std::function<double(std::size_t k)>;

inline std::vector<double> draw(const FiniteSumObjective& obj, Sampler& sampler, const std::vector<double>& x) {
  BlockedVector xv(obj.layout(), x);
  BlockedVector g = xv.zeros_like();
  if (sampler.mode() == SamplingMode::full) {
    obj.eval_full(xv, g);
  } else {
    obj.eval_component(sampler.next_index(), xv, g);
  }
  return {g.flat().begin(), g.flat().end()};
}

// x <- x - eta g
inline ReferenceRun reference_sgd(const FiniteSumObjective& obj, Sampler sampler, std::vector<double> x,
                                  std::size_t steps, const StepSize& eta) {
  ReferenceRun run{{x}};
  for (std::size_t k = 0; k < steps; ++k) {
    const std::vector<double> g = draw(obj, sampler, x);
    const double e = eta(k);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = x[j] - e * g[j];
    run.iterates.push_back(x);
  }
  return run;
}

// x <- x - eta m;  m <- m - theta (m - g), with g drawn at the old x.
inline ReferenceRun reference_momentum_sgd(const FiniteSumObjective& obj, Sampler sampler, std::vector<double> x,
                                           std::size_t steps, const StepSize& eta, const StepSize& theta) {
  ReferenceRun run{{x}};
  std::vector<double> m(x.size(), 0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const std::vector<double> g = draw(obj, sampler, x);
    const double e = eta(k);
    const double th = theta(k);
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] = x[j] - e * m[j];
      const double d = m[j] - g[j];
      m[j] = m[j] - th * d;
    }
    run.iterates.push_back(x);
  }
  return run;
}

// x <- clamp(soft(x - eta g, eta lambda), lo, hi)
inline ReferenceRun reference_prox_sgd(const FiniteSumObjective& obj, Sampler sampler, std::vector<double> x,
                                       std::size_t steps, const StepSize& eta, double lambda, double lo,
                                       double hi) {
  ReferenceRun run{{x}};
  for (std::size_t k = 0; k < steps; ++k) {
    const std::vector<double> g = draw(obj, sampler, x);
    const double e = eta(k);
    const double t = e * lambda;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double y = x[j] - e * g[j];
      const double s = std::copysign(std::max(std::fabs(y) - t, 0.0), y);
      x[j] = std::min(hi, std::max(lo, s));
    }
    run.iterates.push_back(x);
  }
  return run;
}

}  // namespace bregsub::testing
