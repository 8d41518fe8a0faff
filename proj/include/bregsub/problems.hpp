// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bregsub/blocked_vector.hpp"
#include "bregsub/oracle.hpp"
#include "bregsub/prox.hpp"

namespace bregsub {

struct ProblemSpec {
  std::string name;
  std::size_t dimension = 0;
  std::size_t components = 0;
  std::uint64_t seed = 0;
  // Ground truth when an oracle applies: optimum value and one minimizer.
  std::optional<double> f_star;
  std::optional<std::vector<double>> x_star;
  std::string oracle = "none";
};

struct Problem {
  FiniteSumObjective objective;
  Regularizer regularizer;
  ConstraintSet constraint;
  ProblemSpec spec;
  BlockedVector x0;
};

// Rows a_i and targets b_i of a least-absolute-deviations instance.
struct LadData {
  std::vector<std::vector<double>> a;
  std::vector<double> b;

  std::size_t rows() const { return b.size(); }
  std::size_t cols() const { return a.empty() ? 0 : a.front().size(); }
};

// Standard normal entries, drawn as A (row-major) then b. With `consistent`,
// a standard normal x_bar is drawn after A and b = A x_bar.
LadData generate_lad_data(std::size_t m, std::size_t n, std::uint64_t seed, bool consistent = false);

// (1/m) sum_i |<a_i, x> - b_i|.
double lad_value(const LadData& data, std::span<const double> x);

struct OracleSolution {
  double value = 0.0;
  std::vector<double> x;
  std::size_t candidates = 0;
};

// Minimum of the LAD objective over all intersections of n of the
// hyperplanes <a_i, x> = b_i (Cramer's rule). Throws UnsupportedError for
// n > 3 and std::invalid_argument when m < n or no vertex exists.
OracleSolution lad_vertex_oracle(const LadData& data);

// Minimum of lad + lambda ||x||_1 over [0, x_max]^n, x_max = lad(0) / lambda:
// a coarse grid followed by 5x zoom stages down to a step of 1e-6.
// Throws UnsupportedError for n > 2 and std::invalid_argument for lambda <= 0.
OracleSolution lasso_lad_grid_oracle(const LadData& data, double lambda);

Problem make_l1_regression(const LadData& data, std::uint64_t seed = 0);
Problem make_l1_regression(std::size_t m, std::size_t n, std::uint64_t seed, bool consistent = false);

// One component per data vector; data vectors and the initial weights are
// standard normal from `seed`. f* = 0 (attained at W2 = 0).
std::shared_ptr<const ReluNetOracle> make_relu_oracle(std::size_t d_in, std::size_t d_hidden, std::size_t d_out,
                                                      std::vector<double> x_data);
Problem make_relu_net(std::size_t d_in, std::size_t d_hidden, std::size_t d_out, std::size_t samples,
                      std::uint64_t seed);

// x^2 - |x| + 1 from x0 = 2; minima at +-1/2 with value 3/4.
Problem make_nonregular_scalar();

// (1/N) sum_i 1/2 ||x - c_i||^2 from x0 = (1, ..., 1). N = 1 uses c = 0;
// otherwise the centers are standard normal from `seed`.
Problem make_quadratic(std::size_t n, std::size_t components = 1, std::uint64_t seed = 0);

// LAD + lambda ||x||_1 over x >= 0, from x0 = (1, ..., 1).
Problem make_lasso_lad(std::size_t m, std::size_t n, double lambda, std::uint64_t seed);

}  // namespace bregsub
