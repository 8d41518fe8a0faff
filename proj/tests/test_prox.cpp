// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <functional>

#include "bregsub/error.hpp"
#include "bregsub/kernel.hpp"
#include "bregsub/prox.hpp"
#include "support.hpp"

using namespace bregsub;
using namespace bregsub::testing;

namespace {

// Minimizer on [lo, hi] of a convex function given its right derivative:
// the smallest u with right derivative >= 0, located by bisection.
double convex_argmin(const std::function<double(double)>& right_derivative, double lo, double hi) {
  if (right_derivative(lo) >= 0.0) return lo;
  double a = lo, b = hi;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) break;
    (right_derivative(mid) >= 0.0 ? b : a) = mid;
  }
  return b;
}

double sign_right(double u) { return u >= 0.0 ? 1.0 : -1.0; }

double dpsi(double u, double sigma, int r) { return u * (1.0 + sigma * std::pow(std::fabs(u), r - 2)); }

}  // namespace

TEST_SUITE("prox") {
  TEST_CASE("soft-thresholding") {
    const EuclideanKernel k;
    const auto r = bregman_prox(k, Regularizer::l1(0.5), BlockedVector::from({2.0, -0.3}), 1.0, 1e-12);
    CHECK(r.point == BlockedVector::from({1.5, 0.0}));
    CHECK(r.certificate.ok());
    const auto r2 = bregman_prox(k, Regularizer::l1(0.25), BlockedVector::from({2.0, -0.3}), 2.0, 1e-12);
    CHECK(r2.point == BlockedVector::from({1.5, 0.0}));
  }

  TEST_CASE("prox of zero is the identity") {
    const BlockPolynomialKernel k({0.01, 4});
    const auto x = BlockedVector::from({0.7, -2.0, 3.0});
    const auto r = bregman_prox(k, Regularizer::none(), x, 0.3, 1e-10);
    CHECK(norm(r.point - x) <= 1e-13 * norm(x));
    CHECK(bregman_prox(EuclideanKernel(), Regularizer::none(), x, 0.3, 1e-10).point == x);
  }

  TEST_CASE("coordinate polynomial L1 prox matches a 1-D grid oracle") {
    const double sigma = 0.01, lambda = 0.4, eta = 1.5;
    const CoordPolynomialKernel k({sigma, 4});
    const auto x = BlockedVector::from({3.0, -0.2, 0.5, -7.0, 0.0});
    const auto r = bregman_prox(k, Regularizer::l1(lambda), x, eta, 1e-12);
    for (std::size_t j = 0; j < x.total_dim(); ++j) {
      const double xj = x[j];
      const auto d = [&](double u) { return eta * lambda * sign_right(u) + dpsi(u, sigma, 4) - dpsi(xj, sigma, 4); };
      CHECK(r.point[j] == doctest::Approx(convex_argmin(d, -10.0, 10.0)).epsilon(1e-8).scale(1.0));
    }
  }

  TEST_CASE("unconstrained euclidean step is a gradient step") {
    const EuclideanKernel k;
    const auto x = BlockedVector::from({1.0, -2.0, 0.5});
    const auto g = BlockedVector::from({0.3, 0.1, -4.0});
    const auto r = forward_backward(k, Regularizer::none(), ConstraintSet::whole_space(), x, g, 0.1, 1e-12);
    BlockedVector expect = x;
    for (std::size_t j = 0; j < 3; ++j) expect[j] = x[j] - 0.1 * g[j];
    CHECK(bitwise_equal(r.point, expect));
  }

  TEST_CASE("nonnegative orthant with an active bound") {
    const EuclideanKernel k;
    const auto r = forward_backward(k, Regularizer::none(), ConstraintSet::nonneg(), BlockedVector::from({1.0, 1.0}),
                                    BlockedVector::from({0.0, 2.0}), 1.0, 1e-12);
    CHECK(r.point == BlockedVector::from({1.0, 0.0}));
    CHECK(r.certificate.stationarity_residual == 0.0);
    CHECK(r.certificate.decrease_ok);
  }

  TEST_CASE("box with L1 matches a coordinatewise grid oracle") {
    const EuclideanKernel ke;
    const CoordPolynomialKernel kc({0.05, 4});
    Rng rng(21);
    const double lambda = 0.3, eta = 0.7, lo = -1.0, hi = 1.0;
    for (const Kernel* k : {static_cast<const Kernel*>(&ke), static_cast<const Kernel*>(&kc)}) {
      const bool poly = k == &kc;
      for (int trial = 0; trial < 10; ++trial) {
        auto x = random_vector(make_layout({4}), rng, 1.0);
        ConstraintSet::box(lo, hi).project(x);
        const auto g = random_vector(make_layout({4}), rng, 2.0);
        const auto r = forward_backward(*k, Regularizer::l1(lambda), ConstraintSet::box(lo, hi), x, g, eta, 1e-10);
        for (std::size_t j = 0; j < 4; ++j) {
          const auto d = [&](double u) {
            const double du = poly ? dpsi(u, 0.05, 4) : u;
            const double dx = poly ? dpsi(x[j], 0.05, 4) : x[j];
            return g[j] + (du - dx) / eta + lambda * sign_right(u);
          };
          CHECK(r.point[j] == doctest::Approx(convex_argmin(d, lo, hi)).epsilon(1e-8).scale(1.0));
        }
        CHECK(ConstraintSet::box(lo, hi).contains(r.point));
      }
    }
  }

  TEST_CASE("closed-form steps certify exactly") {
    const EuclideanKernel k;
    Rng rng(22);
    for (int trial = 0; trial < 50; ++trial) {
      const auto x = random_vector(make_layout({5}), rng, 1.0);
      const auto g = random_vector(make_layout({5}), rng, 1.0);
      const auto r = forward_backward(k, Regularizer::l1(0.2), ConstraintSet::box(-0.5, 1.0),
                                      ConstraintSet::box(-0.5, 1.0).contains(x) ? x : x.zeros_like(), g, 0.5, 1e-12);
      CHECK(r.certificate.stationarity_residual <= 1e-12);
      CHECK(r.certificate.decrease_ok);
    }
  }

  TEST_CASE("prox is nonexpansive for the euclidean kernel") {
    const EuclideanKernel k;
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
      const auto x = random_vector(make_layout({3}), rng, 2.0);
      const auto y = random_vector(make_layout({3}), rng, 2.0);
      const auto px = bregman_prox(k, Regularizer::l1(0.3), x, 1.0, 1e-12).point;
      const auto py = bregman_prox(k, Regularizer::l1(0.3), y, 1.0, 1e-12).point;
      CHECK(norm(px - py) <= norm(x - y) * (1.0 + 1e-15));
    }
  }

  TEST_CASE("sigma = 0 polynomial subproblem equals the euclidean closed form") {
    const EuclideanKernel ke;
    const CoordPolynomialKernel kc({0.0, 4});
    Rng rng(24);
    for (int trial = 0; trial < 20; ++trial) {
      const auto x = random_vector(make_layout({6}), rng, 1.0);
      const auto g = random_vector(make_layout({6}), rng, 1.0);
      const auto a = forward_backward(ke, Regularizer::l1(0.1), ConstraintSet::box(-1.0, 2.0),
                                      x.zeros_like(), g, 0.8, 1e-10);
      const auto b = forward_backward(kc, Regularizer::l1(0.1), ConstraintSet::box(-1.0, 2.0),
                                      x.zeros_like(), g, 0.8, 1e-10);
      CHECK(norm(a.point - b.point) <= 1e-10);
    }
  }

  TEST_CASE("polynomial kernel step satisfies both certificates") {
    const CoordPolynomialKernel k({0.01, 6});
    Rng rng(25);
    for (int trial = 0; trial < 50; ++trial) {
      auto x = random_vector(make_layout({4}), rng, 3.0);
      ConstraintSet::nonneg().project(x);
      const auto g = random_vector(make_layout({4}), rng, 1.0);
      const auto r = forward_backward(k, Regularizer::l1(0.05), ConstraintSet::nonneg(), x, g, 0.2, 1e-9);
      CHECK(r.certificate.ok());
      CHECK(r.certificate.stationarity_residual <= 1e-9);
      CHECK(ConstraintSet::nonneg().contains(r.point));
    }
  }

  TEST_CASE("block kernels only solve unregularized unconstrained subproblems") {
    const BlockPolynomialKernel k({0.01, 4});
    const auto x = BlockedVector::from({3.0, 4.0});
    const auto g = BlockedVector::from({0.6, 0.8});
    CHECK_THROWS_AS(forward_backward(k, Regularizer::l1(0.1), ConstraintSet::whole_space(), x, g, 1.0, 1e-8),
                    UnsupportedError);
    CHECK_THROWS_AS(forward_backward(k, Regularizer::none(), ConstraintSet::nonneg(), x, g, 1.0, 1e-8),
                    UnsupportedError);
    const auto r = forward_backward(k, Regularizer::none(), ConstraintSet::whole_space(), x, g, 1.0, 1e-8);
    const double t = bisect_radial(5.25, 0.01, 4);
    CHECK(r.point[0] == doctest::Approx(3.15 * t / 5.25).epsilon(1e-12));
    CHECK(r.point[1] == doctest::Approx(4.2 * t / 5.25).epsilon(1e-12));
  }

  TEST_CASE("subgradient element uses sign(0) = 0") {
    CHECK(subgradient_element(Regularizer::l1(1.0), BlockedVector::from({2.0, 0.0, -1.0})) ==
          BlockedVector::from({1.0, 0.0, -1.0}));
    CHECK(subgradient_element(Regularizer::none(), BlockedVector::from({2.0})) == BlockedVector::from({0.0}));
    CHECK(subgradient_element(Regularizer::l1(0.5), BlockedVector::from({-3.0})) == BlockedVector::from({-0.5}));
  }

  TEST_CASE("minimum-norm residual") {
    const auto zero = BlockedVector::from({0.0, 0.0});
    // Interior, R = 0: the plain norm.
    CHECK(min_norm_residual(BlockedVector::from({3.0, 0.0}), BlockedVector::from({0.0, 4.0}), Regularizer::none(),
                            ConstraintSet::whole_space(), BlockedVector::from({0.5, 0.5})) == 5.0);
    // At zero the L1 interval [-lambda, lambda] absorbs small residuals.
    CHECK(min_norm_residual(BlockedVector::from({0.3, -0.5}), zero, Regularizer::l1(0.5),
                            ConstraintSet::whole_space(), zero) == 0.0);
    CHECK(min_norm_residual(BlockedVector::from({0.8, 0.0}), zero, Regularizer::l1(0.5),
                            ConstraintSet::whole_space(), zero) == doctest::Approx(0.3));
    // Active upper bound: the cone [0, inf) absorbs a negative residual only.
    const auto at_upper = BlockedVector::from({1.0, 0.0});
    CHECK(min_norm_residual(BlockedVector::from({-3.0, 0.0}), zero, Regularizer::none(),
                            ConstraintSet::box(-1.0, 1.0), at_upper) == 0.0);
    CHECK(min_norm_residual(BlockedVector::from({3.0, 0.0}), zero, Regularizer::none(),
                            ConstraintSet::box(-1.0, 1.0), at_upper) == 3.0);
  }

  TEST_CASE("lambda large enough makes the origin stationary") {
    const EuclideanKernel k;
    const auto zero = BlockedVector::from({0.0, 0.0});
    const auto r = forward_backward(k, Regularizer::l1(5.0), ConstraintSet::nonneg(), zero,
                                    BlockedVector::from({-1.0, 2.0}), 1.0, 1e-12);
    CHECK(r.point == zero);
    CHECK(r.certificate.stationarity_residual == 0.0);
  }

  TEST_CASE("argument validation") {
    const EuclideanKernel k;
    CHECK_THROWS_AS(Regularizer::l1(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(ConstraintSet::box(1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(forward_backward(k, Regularizer::none(), ConstraintSet::whole_space(), BlockedVector::from({1.0}),
                                     BlockedVector::from({1.0}), 0.0, 1.0),
                    std::invalid_argument);
    CHECK(constraint_kind_from_string("box") == ConstraintKind::box);
    CHECK(regularizer_kind_from_string("l1") == RegularizerKind::l1);
  }
}
