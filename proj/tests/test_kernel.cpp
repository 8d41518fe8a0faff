// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "bregsub/error.hpp"
#include "bregsub/kernel.hpp"
#include "support.hpp"

using namespace bregsub;
using namespace bregsub::testing;

namespace {

std::vector<double> to_std(const BlockedVector& v) { return {v.flat().begin(), v.flat().end()}; }

}  // namespace

TEST_SUITE("kernel") {
  TEST_CASE("euclidean maps are identities") {
    const EuclideanKernel k;
    const auto x = BlockedVector::from({3.0, 4.0});
    CHECK(k.value(x) == 12.5);
    CHECK(k.grad(x) == x);
    CHECK(k.grad_conj(BlockedVector::from({3.75, 5.0})) == BlockedVector::from({3.75, 5.0}));
    CHECK(k.bregman(BlockedVector::from({1.0, 0.0}), BlockedVector::from({0.0, 0.0})) == 0.5);
    CHECK(k.hessian_apply(x, BlockedVector::from({1.0, 2.0})) == BlockedVector::from({1.0, 2.0}));
    CHECK(k.inv_hessian_apply(x, BlockedVector::from({1.0, 2.0})) == BlockedVector::from({1.0, 2.0}));
  }

  TEST_CASE("block polynomial worked example at (3, 4)") {
    const BlockPolynomialKernel k({0.01, 4});
    const auto x = BlockedVector::from({3.0, 4.0});
    CHECK(k.value(x) == doctest::Approx(14.0625).epsilon(1e-15));
    const auto g = k.grad(x);
    CHECK(g[0] == doctest::Approx(3.75).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(5.0).epsilon(1e-15));
    const auto back = k.grad_conj(BlockedVector::from({3.75, 5.0}));
    CHECK(back[0] == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(back[1] == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(k.value(x.zeros_like()) == 0.0);
    CHECK(k.grad(x.zeros_like()) == x.zeros_like());
    CHECK(k.grad_conj(x.zeros_like()) == x.zeros_like());
  }

  TEST_CASE("block polynomial hessian at (3, 4) matches finite differences of grad") {
    const BlockPolynomialKernel k({0.01, 4});
    const auto J = fd_jacobian([&](const std::vector<double>& p) { return to_std(k.grad(BlockedVector::from(p))); },
                               {3.0, 4.0}, 1e-5);
    const auto hv = k.hessian_apply(BlockedVector::from({3.0, 4.0}), BlockedVector::from({1.0, 0.0}));
    CHECK(hv[0] == doctest::Approx(J(0, 0)).epsilon(1e-8));
    CHECK(hv[1] == doctest::Approx(J(1, 0)).epsilon(1e-8));
    // Frozen from the finite-difference oracle: 1.25 (1,0) + 0.02 * 3 * (3,4).
    CHECK(hv[0] == doctest::Approx(1.43).epsilon(1e-14));
    CHECK(hv[1] == doctest::Approx(0.24).epsilon(1e-14));

    const auto w = k.inv_hessian_apply(BlockedVector::from({3.0, 4.0}), BlockedVector::from({1.0, 0.0}));
    const auto dense = dense_solve(J, std::vector<double>{1.0, 0.0});
    CHECK(w[0] == doctest::Approx(dense[0]).epsilon(1e-8));
    CHECK(w[1] == doctest::Approx(dense[1]).epsilon(1e-8));
  }

  TEST_CASE("textbook dense hessian agrees with finite differences") {
    Rng rng(3);
    for (int degree : {4, 5, 6}) {
      for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> x(4);
        for (double& v : x) v = 2.0 * rng.normal();
        const BlockPolynomialKernel k({0.05, degree});
        const auto J = fd_jacobian([&](const std::vector<double>& p) { return to_std(k.grad(BlockedVector::from(p))); },
                                   x, 1e-6);
        const auto H = dense_block_poly_hessian(x, 0.05, degree);
        CHECK((J - H).norm() <= 1e-5 * (1.0 + H.norm()));
      }
    }
  }

  TEST_CASE("inverse hessian matches dense LU on random blocks") {
    Rng rng(4);
    for (double sigma : {1e-6, 1e-4, 0.01, 1.0}) {
      for (int degree : {4, 6}) {
        for (std::size_t n : {1u, 2u, 5u, 16u}) {
          const auto layout = make_layout({n, n});
          const BlockPolynomialKernel k({sigma, degree}, layout);
          for (double scale : {0.0, 1e-3, 1.0, 30.0}) {
            const auto x = random_vector(layout, rng, scale);
            const auto v = random_vector(layout, rng, 1.0);
            const auto w = k.inv_hessian_apply(x, v);
            for (std::size_t b = 0; b < 2; ++b) {
              const auto ref = dense_solve(dense_block_poly_hessian(x.block(b), sigma, degree), v.block(b));
              double num = 0.0, den = 0.0;
              for (std::size_t i = 0; i < n; ++i) {
                num += (w.block(b)[i] - ref[i]) * (w.block(b)[i] - ref[i]);
                den += ref[i] * ref[i];
              }
              CHECK(std::sqrt(num) <= 1e-10 * std::sqrt(den));
            }
            const auto back = k.hessian_apply(x, w);
            CHECK(norm(back - v) <= 1e-10 * norm(v));
          }
        }
      }
    }
  }

  TEST_CASE("hessian at the origin is the identity") {
    for (int degree : {4, 5, 6}) {
      const BlockPolynomialKernel k({0.3, degree});
      const auto zero = BlockedVector::from({0.0, 0.0, 0.0});
      const auto v = BlockedVector::from({1.0, -2.0, 0.5});
      CHECK(k.hessian_apply(zero, v) == v);
      CHECK(k.inv_hessian_apply(zero, v) == v);
    }
  }

  TEST_CASE("grad_conj agrees with a bisection oracle") {
    Rng rng(5);
    for (double sigma : {1e-6, 1e-4, 0.01, 2.0}) {
      for (int degree : {4, 5, 6, 8}) {
        const BlockPolynomialKernel k({sigma, degree});
        for (int trial = 0; trial < 20; ++trial) {
          const auto y = random_vector(make_layout({3}), rng, std::pow(10.0, trial % 5 - 1));
          const double s = norm(y);
          const double t = bisect_radial(s, sigma, degree);
          const auto x = k.grad_conj(y);
          CHECK(norm(x) == doctest::Approx(t).epsilon(1e-11));
        }
      }
    }
  }

  TEST_CASE("solve_radial on the cubic from the sbg example") {
    const double t = solve_radial(5.25, 0.01, 4, 1e-14);
    CHECK(t == doctest::Approx(bisect_radial(5.25, 0.01, 4)).epsilon(1e-14));
    CHECK(t == doctest::Approx(4.398835919246386).epsilon(1e-12));
    CHECK(solve_radial(0.0, 0.01, 4, 1e-12) == 0.0);
    CHECK(solve_radial(2.0, 0.0, 4, 1e-12) == 2.0);
  }

  TEST_CASE("solve_radial reports non-convergence") {
    CHECK_THROWS_AS(solve_radial(1e6, 1.0, 8, 1e-300, 2), ConvergenceError);
  }

  TEST_CASE("grad is the derivative of value") {
    Rng rng(6);
    const auto layout = make_layout({3, 2});
    std::vector<std::unique_ptr<Kernel>> kernels;
    kernels.push_back(make_kernel({KernelKind::euclidean}, layout));
    kernels.push_back(make_kernel({KernelKind::block_poly, 0.05, 4}, layout));
    kernels.push_back(make_kernel({KernelKind::block_poly, 0.01, 6}, layout));
    kernels.push_back(make_kernel({KernelKind::coord_poly, 0.05, 5}, layout));
    for (const auto& k : kernels) {
      for (int trial = 0; trial < 10; ++trial) {
        const auto x = random_vector(layout, rng, 1.5);
        const auto fd = fd_gradient([&](const std::vector<double>& p) { return k->value(BlockedVector(layout, p)); },
                                    to_std(x), 1e-6);
        CHECK(max_abs_diff(fd, k->grad(x).flat()) <= 1e-6 * (1.0 + norm(x)));
      }
    }
  }

  TEST_CASE("coordinate polynomial maps") {
    const CoordPolynomialKernel k({0.01, 4});
    const auto x = BlockedVector::from({3.0, -4.0});
    CHECK(k.value(x) == doctest::Approx(12.5 + 0.0025 * (81.0 + 256.0)));
    const auto g = k.grad(x);
    CHECK(g[0] == doctest::Approx(3.0 * 1.09));
    CHECK(g[1] == doctest::Approx(-4.0 * 1.16));
    const auto back = k.grad_conj(g);
    CHECK(back[0] == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(back[1] == doctest::Approx(-4.0).epsilon(1e-13));
    const auto v = BlockedVector::from({1.0, 1.0});
    const auto hv = k.hessian_apply(x, v);
    CHECK(hv[0] == doctest::Approx(1.0 + 0.03 * 9.0));
    CHECK(hv[1] == doctest::Approx(1.0 + 0.03 * 16.0));
    const auto w = k.inv_hessian_apply(x, hv);
    CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("round trip over the experimental parameter settings") {
    Rng rng(7);
    const auto layout = make_layout({4, 1, 9});
    std::vector<std::unique_ptr<Kernel>> kernels;
    kernels.push_back(make_kernel({KernelKind::euclidean}, layout));
    for (double sigma : {1e-6, 1e-4, 0.01}) {
      for (int r : {4, 6}) {
        kernels.push_back(make_kernel({KernelKind::block_poly, sigma, r}, layout));
        kernels.push_back(make_kernel({KernelKind::coord_poly, sigma, r}, layout));
      }
    }
    for (const auto& k : kernels) {
      for (int trial = 0; trial < 50; ++trial) {
        // Block norms spread over [0, 100].
        auto x = random_vector(layout, rng, 1.0);
        for (std::size_t b = 0; b < layout->num_blocks(); ++b) {
          const double target = 100.0 * rng.uniform01();
          const double bn = block_norm(x, b);
          for (double& v : x.block(b)) v *= bn > 0 ? target / bn : 0.0;
        }
        CHECK(norm(k->grad_conj(k->grad(x)) - x) <= 1e-9 * (1.0 + norm(x)));
      }
    }
  }

  TEST_CASE("value is convex along segments") {
    Rng rng(8);
    const auto layout = make_layout({3, 3});
    const BlockPolynomialKernel k({0.1, 4}, layout);
    const CoordPolynomialKernel c({0.1, 6}, layout);
    for (int trial = 0; trial < 50; ++trial) {
      const auto x = random_vector(layout, rng, 2.0);
      const auto y = random_vector(layout, rng, 2.0);
      for (double s : {0.1, 0.5, 0.9}) {
        const auto z = (1.0 - s) * x + s * y;
        CHECK(k.value(z) <= (1.0 - s) * k.value(x) + s * k.value(y) + 1e-12);
        CHECK(c.value(z) <= (1.0 - s) * c.value(x) + s * c.value(y) + 1e-12);
      }
    }
  }

  TEST_CASE("bregman distance is nonnegative and separates points") {
    Rng rng(9);
    const auto layout = make_layout({2, 3});
    const BlockPolynomialKernel k({0.01, 4}, layout);
    for (int trial = 0; trial < 100; ++trial) {
      const auto x = random_vector(layout, rng, 3.0);
      const auto y = random_vector(layout, rng, 3.0);
      CHECK(k.bregman(x, y) >= 0.0);
      CHECK(k.bregman(x, x) == doctest::Approx(0.0));
      // D >= 1/2 ||x - y||^2 since the Hessian dominates I.
      CHECK(k.bregman(x, y) >= 0.5 * squared_norm(x - y) * (1.0 - 1e-12));
    }
    const BlockPolynomialKernel unbound({0.01, 4});
    const auto x = BlockedVector::from({1.0, 2.0});
    const auto y = BlockedVector::from({1.0, 2.0 + 1e-7});
    CHECK(unbound.bregman(x, y) > 0.0);
  }

  TEST_CASE("sigma = 0 collapses to the euclidean kernel") {
    const BlockPolynomialKernel k({0.0, 4});
    const CoordPolynomialKernel c({0.0, 6});
    const auto x = BlockedVector::from({0.3, -1.7, 2.0});
    CHECK(k.value(x) == doctest::Approx(0.5 * squared_norm(x)));
    CHECK(k.grad(x) == x);
    CHECK(c.grad(x) == x);
    CHECK(norm(k.grad_conj(x) - x) == 0.0);
    CHECK(norm(c.grad_conj(x) - x) == 0.0);
  }

  TEST_CASE("per-block parameters") {
    const auto layout = make_layout({2, 2});
    const BlockPolynomialKernel k({{0.01, 4}, {1.0, 6}}, layout);
    const BlockedVector x(layout, {3, 4, 1, 0});
    const auto g = k.grad(x);
    CHECK(g[0] == doctest::Approx(3.75));
    CHECK(g[2] == doctest::Approx(2.0));
    CHECK(k.params(1).degree == 6);
    CHECK_THROWS_AS(BlockPolynomialKernel({{0.01, 4}}, layout), DimensionError);
  }

  TEST_CASE("parameter and layout validation") {
    CHECK_THROWS_AS(validate(PolyParams{-0.1, 4}), std::invalid_argument);
    CHECK_THROWS_AS(validate(PolyParams{0.1, 3}), std::invalid_argument);
    CHECK_THROWS_AS(BlockPolynomialKernel({-1.0, 4}), std::invalid_argument);
    CHECK_NOTHROW(validate(PolyParams{0.0, 4}));
    const BlockPolynomialKernel k({0.01, 4}, make_layout({2}));
    CHECK_THROWS_AS(k.grad(BlockedVector::from({1.0, 2.0, 3.0})), DimensionError);
    CHECK(to_string(kernel_kind_from_string("coord_poly")) == "coord_poly");
    CHECK_THROWS_AS(kernel_kind_from_string("mirror"), std::invalid_argument);
  }

  TEST_CASE("extreme block norms") {
    const BlockPolynomialKernel k({0.01, 6});
    for (double scale : {1e-200, 1e-8, 1e3, 1e5}) {
      const auto x = BlockedVector::from({0.6 * scale, -0.8 * scale});
      CHECK(norm(k.grad_conj(k.grad(x)) - x) <= 1e-9 * (1.0 + scale));
    }
  }
}
