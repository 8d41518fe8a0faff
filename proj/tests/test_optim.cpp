// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "bregsub/error.hpp"
#include "bregsub/optim.hpp"
#include "bregsub/problems.hpp"
#include "support.hpp"

using namespace bregsub;
using namespace bregsub::testing;

namespace {

RunSettings constant_settings(Method method, double eta, double theta, std::size_t epochs) {
  RunSettings s;
  s.method = method;
  s.eta_schedule = {ScheduleKind::constant, eta};
  s.theta_schedule = {ScheduleKind::constant, theta};
  s.budget_epochs = epochs;
  return s;
}

std::vector<double> flat(const BlockedVector& v) { return {v.flat().begin(), v.flat().end()}; }

}  // namespace

TEST_SUITE("optim") {
  TEST_CASE("euclidean sbg is a plain gradient step") {
    const EuclideanKernel k;
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
      auto x = random_vector(make_layout({3, 2}), rng, 2.0);
      const auto g = random_vector(make_layout({3, 2}), rng, 1.0);
      BlockedVector expect = x;
      for (std::size_t j = 0; j < x.total_dim(); ++j) expect[j] = x[j] - 0.3 * g[j];
      sbg_update(k, x, g, 0.3, 1e-12);
      CHECK(bitwise_equal(x, expect));
    }
  }

  TEST_CASE("polynomial sbg step along the dual ray") {
    const BlockPolynomialKernel k({0.01, 4});
    auto x = BlockedVector::from({3.0, 4.0});
    const auto rep = sbg_update(k, x, BlockedVector::from({0.6, 0.8}), 1.0, 1e-10);
    const double t = bisect_radial(5.25, 0.01, 4);
    CHECK(t == doctest::Approx(4.398835919246386).epsilon(1e-12));
    CHECK(x[0] == doctest::Approx(3.15 * t / 5.25).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(4.2 * t / 5.25).epsilon(1e-12));
    CHECK(rep.cert_residual <= 1e-10);
  }

  TEST_CASE("zero element leaves x in place") {
    const BlockPolynomialKernel k({0.05, 6});
    Rng rng(32);
    for (int trial = 0; trial < 20; ++trial) {
      auto x = random_vector(make_layout({4}), rng, 3.0);
      const auto x0 = x;
      sbg_update(k, x, x.zeros_like(), 0.5, 1e-10);
      CHECK(norm(x - x0) <= 1e-13 * (1.0 + norm(x0)));
    }
  }

  TEST_CASE("msbg with theta = 1 from zero momentum") {
    const EuclideanKernel k;
    auto x = BlockedVector::from({1.0, -2.0});
    auto m = x.zeros_like();
    const auto g = BlockedVector::from({0.25, 0.5});
    msbg_update(k, x, m, g, 0.1, 1.0, 1e-12);
    CHECK(x == BlockedVector::from({1.0, -2.0}));
    CHECK(m == g);
  }

  TEST_CASE("msbg converges on a quadratic") {
    const EuclideanKernel k;
    auto x = BlockedVector::from({1.0, 1.0});
    auto m = x.zeros_like();
    for (int it = 0; it < 500; ++it) msbg_update(k, x, m, x, 0.1, 0.5, 1e-12);
    CHECK(norm(m) <= 1e-6);
    CHECK(norm(x) <= 1e-4);
  }

  TEST_CASE("explicit and implicit momentum agree to first order") {
    const BlockPolynomialKernel k({0.1, 4});
    const auto x0 = BlockedVector::from({1.0, -2.0, 0.5});
    const auto m0 = BlockedVector::from({0.3, 0.2, -0.4});
    const auto g = BlockedVector::from({-0.1, 0.7, 0.2});
    double prev = INFINITY;
    for (double eta : {1e-1, 1e-2, 1e-3, 1e-4}) {
      auto xa = x0, ma = m0, xb = x0, mb = m0;
      msbg_update(k, xa, ma, g, eta, 0.5, 1e-9);
      imsbg_update(k, xb, mb, g, eta, 0.5);
      const double ratio = norm(xa - xb) / eta;
      CHECK(ratio < prev);
      prev = ratio;
      CHECK(bitwise_equal(ma, mb));
    }
    CHECK(prev < 1e-3);
  }

  TEST_CASE("preconditioned residual vanishes linearly in eta") {
    const BlockPolynomialKernel k({0.1, 4});
    const auto x0 = BlockedVector::from({1.0, -2.0, 0.5});
    const auto g = BlockedVector::from({-0.1, 0.7, 0.2});
    std::vector<double> res;
    for (double eta : {1e-1, 1e-2, 1e-3}) {
      auto x = x0;
      const auto rep = sbg_precond_update(k, x, g, eta);
      CHECK(rep.nu == kNoCertificate);
      res.push_back(rep.cert_residual);
    }
    CHECK(res[1] / res[0] == doctest::Approx(0.1).epsilon(0.1));
    CHECK(res[2] / res[1] == doctest::Approx(0.1).epsilon(0.05));
  }

  TEST_CASE("euclidean run matches a textbook sgd loop bitwise") {
    const Problem p = make_l1_regression(50, 2, 7);
    const EuclideanKernel k;
    RunSettings s;
    s.method = Method::sbg;
    s.budget_epochs = 2;
    Sampler sampler(SamplingMode::reshuffle, p.objective.size(), 5);
    const Sampler fresh = sampler;
    const RunResult r = run(p.objective, k, sampler, p.x0, s);
    const std::size_t spe = fresh.steps_per_epoch();
    const auto ref = reference_sgd(p.objective, fresh, flat(p.x0), 100,
                                   [&](std::size_t it) { return s.eta_schedule.eval(it / spe); });
    CHECK(flat(r.state.x) == ref.iterates.back());
  }

  TEST_CASE("zero budget records only the initial point") {
    const Problem p = make_quadratic(3);
    const EuclideanKernel k;
    Sampler sampler(SamplingMode::full, 1, 1);
    const RunResult r = run(p.objective, k, sampler, p.x0, constant_settings(Method::sbg, 0.1, 0.1, 0));
    REQUIRE(r.trace.size() == 1);
    CHECK(r.trace[0].iter == 0);
    CHECK(r.trace[0].f_value == p.objective.value(p.x0));
    CHECK(r.iterations == 0);
    CHECK(r.state.x == p.x0);
  }

  TEST_CASE("runs are deterministic") {
    const Problem p = make_relu_net(3, 4, 2, 16, 11);
    const BlockPolynomialKernel k({0.01, 4});
    for (Method m : {Method::sbg, Method::sbg_precond, Method::msbg, Method::imsbg}) {
      RunSettings s;
      s.method = m;
      s.budget_epochs = 5;
      Sampler a(SamplingMode::reshuffle, p.objective.size(), 9);
      Sampler b(SamplingMode::reshuffle, p.objective.size(), 9);
      RunResult ra = run(p.objective, k, a, p.x0, s);
      RunResult rb = run(p.objective, k, b, p.x0, s);
      REQUIRE(ra.trace.size() == rb.trace.size());
      for (std::size_t i = 0; i < ra.trace.size(); ++i) {
        ra.trace[i].wall_ns = rb.trace[i].wall_ns = 0;
        CHECK(ra.trace[i] == rb.trace[i]);
      }
      CHECK(bitwise_equal(ra.state.x, rb.state.x));
    }
  }

  TEST_CASE("trace stride") {
    const Problem p = make_quadratic(2);
    const EuclideanKernel k;
    Sampler sampler(SamplingMode::full, 1, 1);
    auto s = constant_settings(Method::sbg, 0.1, 0.1, 10);
    s.trace_stride = 4;
    const RunResult r = run(p.objective, k, sampler, p.x0, s);
    std::vector<std::uint64_t> iters;
    for (const auto& row : r.trace) iters.push_back(row.iter);
    CHECK(iters == std::vector<std::uint64_t>{0, 4, 8, 10});
  }

  TEST_CASE("msbg lyapunov change on a euclidean quadratic") {
    // With g = x and theta = tau eta, one step changes h by exactly
    // -eta |m|^2 + eta^2 |m|^2 / 2 + tau eta^2 |m - x|^2 / 2.
    const EuclideanKernel k;
    const double eta = 0.01, tau = 0.5;
    auto x = BlockedVector::from({1.0, 1.0, 1.0});
    auto m = x.zeros_like();
    for (int it = 0; it < 200; ++it) {
      const double h = lyapunov_msbg(0.5 * squared_norm(x), m, tau);
      const double predicted = -eta * squared_norm(m) + 0.5 * eta * eta * squared_norm(m) +
                               0.5 * tau * eta * eta * squared_norm(m - x);
      msbg_update(k, x, m, x, eta, tau * eta, 1e-9);
      const double h_plus = lyapunov_msbg(0.5 * squared_norm(x), m, tau);
      CHECK(h_plus - h == doctest::Approx(predicted).epsilon(1e-6).scale(1e-15));
    }
  }

  TEST_CASE("msbg lyapunov function is monotone for small steps") {
    // The warm-up increase is tau eta^2 |g|^2 / 2 per step; tau = 1e-4 keeps it below 1e-8.
    const Problem p = make_quadratic(3);
    for (const char* kernel : {"euclidean", "block_poly"}) {
      const auto k = make_kernel({kernel_kind_from_string(kernel), 0.01, 4});
      for (double eta : {5e-3, 1e-3}) {
        const double theta = 1e-4 * eta;
        Sampler sampler(SamplingMode::full, 1, 1);
        const RunResult r = run(p.objective, *k, sampler, p.x0, constant_settings(Method::msbg, eta, theta, 2000));
        REQUIRE(r.ok());
        double prev = INFINITY;
        double worst = -INFINITY;
        for (const auto& row : r.trace) {
          const double h = lyapunov_msbg(row.f_value, row.m_norm, theta / eta);
          worst = std::max(worst, h - prev);
          prev = h;
        }
        INFO(kernel << " eta " << eta);
        CHECK(worst <= 1e-8);
      }
    }
  }

  TEST_CASE("composite runs stay feasible and certified") {
    const Problem p = make_lasso_lad(20, 2, 0.1, 3);
    for (const char* kernel : {"euclidean", "coord_poly"}) {
      const auto k = make_kernel({kernel_kind_from_string(kernel), 0.01, 4});
      RunSettings s;
      s.method = Method::sbpg;
      s.regularizer = p.regularizer;
      s.constraint = p.constraint;
      s.budget_epochs = 50;
      Sampler sampler(SamplingMode::reshuffle, p.objective.size(), 2);
      const RunResult r = run(p.objective, *k, sampler, p.x0, s);
      CHECK(r.ok());
      CHECK(p.constraint.contains(r.state.x));
      CHECK(r.trace.back().f_value < r.trace.front().f_value);
      for (const auto& row : r.trace) CHECK(row.cert_residual <= s.nu.eval(row.iter == 0 ? 0 : row.iter - 1));
    }
  }

  TEST_CASE("invalid combinations are rejected") {
    const Problem p = make_lasso_lad(20, 2, 0.1, 3);
    RunSettings s;
    s.regularizer = p.regularizer;
    s.constraint = p.constraint;
    s.method = Method::msbg;
    CHECK_THROWS_AS(validate_run(EuclideanKernel(), s), UnsupportedError);
    s.method = Method::sbpg;
    CHECK_THROWS_AS(validate_run(BlockPolynomialKernel({0.01, 4}), s), UnsupportedError);
    CHECK_NOTHROW(validate_run(CoordPolynomialKernel({0.01, 4}), s));
    CHECK(method_from_string("imsbg") == Method::imsbg);
    CHECK_THROWS_AS(method_from_string("adam"), std::invalid_argument);
  }

  TEST_CASE("infeasible start is projected with a warning") {
    const Problem p = make_lasso_lad(20, 2, 0.1, 3);
    RunSettings s;
    s.method = Method::sbpg;
    s.regularizer = p.regularizer;
    s.constraint = p.constraint;
    s.budget_epochs = 1;
    Sampler sampler(SamplingMode::reshuffle, p.objective.size(), 2);
    const RunResult r = run(p.objective, EuclideanKernel(), sampler, BlockedVector::from({-1.0, 2.0}), s);
    CHECK(r.ok());
    CHECK_FALSE(r.warnings.empty());
  }
}
