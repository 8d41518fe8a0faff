// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#include "bregsub/problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bregsub/error.hpp"
#include "bregsub/rng.hpp"

namespace bregsub {
namespace {

std::vector<std::shared_ptr<const ConservativeOracle>> lad_components(const LadData& data) {
  std::vector<std::shared_ptr<const ConservativeOracle>> out;
  out.reserve(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) out.push_back(std::make_shared<AbsResidualOracle>(data.a[i], data.b[i]));
  return out;
}

void check_lad(const LadData& data) {
  if (data.rows() == 0 || data.cols() == 0) throw std::invalid_argument("lad: empty data");
  if (data.a.size() != data.b.size()) throw DimensionError("lad: row count and target count differ");
  for (const auto& row : data.a) {
    if (row.size() != data.cols()) throw DimensionError("lad: ragged rows");
  }
}

double det(const std::array<std::array<double, 3>, 3>& m, std::size_t n) {
  switch (n) {
    case 1:
      return m[0][0];
    case 2:
      return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    default:
      return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
             m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  }
}

// Advances `idx` to the next n-subset of {0..m-1} in lexicographic order.
bool next_combination(std::vector<std::size_t>& idx, std::size_t m) {
  const std::size_t n = idx.size();
  for (std::size_t i = n; i-- > 0;) {
    if (idx[i] < m - n + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

double lasso_value(const LadData& data, double lambda, std::span<const double> x) {
  double l1 = 0.0;
  for (double v : x) l1 += std::fabs(v);
  return lad_value(data, x) + lambda * l1;
}

}  // namespace

LadData generate_lad_data(std::size_t m, std::size_t n, std::uint64_t seed, bool consistent) {
  if (m == 0 || n == 0) throw std::invalid_argument("lad: m and n must be positive");
  Rng rng(seed);
  LadData d;
  d.a.assign(m, std::vector<double>(n));
  for (auto& row : d.a) {
    for (double& v : row) v = rng.normal();
  }
  d.b.resize(m);
  if (consistent) {
    std::vector<double> x_bar(n);
    for (double& v : x_bar) v = rng.normal();
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += d.a[i][j] * x_bar[j];
      d.b[i] = s;
    }
  } else {
    for (double& v : d.b) v = rng.normal();
  }
  return d;
}

double lad_value(const LadData& data, std::span<const double> x) {
  if (x.size() != data.cols()) throw DimensionError("lad_value: dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    double r = -data.b[i];
    for (std::size_t j = 0; j < x.size(); ++j) r += data.a[i][j] * x[j];
    total += std::fabs(r);
  }
  return total / static_cast<double>(data.rows());
}

OracleSolution lad_vertex_oracle(const LadData& data) {
  check_lad(data);
  const std::size_t m = data.rows();
  const std::size_t n = data.cols();
  if (n > 3) throw UnsupportedError("lad vertex oracle: n = " + std::to_string(n) + " exceeds 3");
  if (m < n) throw std::invalid_argument("lad vertex oracle: need m >= n");

  OracleSolution best;
  best.value = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(n);
  for (std::size_t j = 0; j < n; ++j) idx[j] = j;
  do {
    std::array<std::array<double, 3>, 3> mat{};
    double scale = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        mat[r][c] = data.a[idx[r]][c];
        scale = std::max(scale, std::fabs(mat[r][c]));
      }
    }
    const double d = det(mat, n);
    if (std::fabs(d) <= 1e-12 * std::pow(std::max(scale, 1e-300), static_cast<double>(n))) continue;
    std::vector<double> x(n);
    for (std::size_t c = 0; c < n; ++c) {
      auto mc = mat;
      for (std::size_t r = 0; r < n; ++r) mc[r][c] = data.b[idx[r]];
      x[c] = det(mc, n) / d;
    }
    ++best.candidates;
    const double v = lad_value(data, x);
    if (v < best.value) {
      best.value = v;
      best.x = std::move(x);
    }
  } while (next_combination(idx, m));
  if (best.candidates == 0) throw std::invalid_argument("lad vertex oracle: no nondegenerate vertex");
  return best;
}

OracleSolution lasso_lad_grid_oracle(const LadData& data, double lambda) {
  check_lad(data);
  const std::size_t n = data.cols();
  if (n > 2) throw UnsupportedError("lasso_lad grid oracle: n = " + std::to_string(n) + " exceeds 2");
  if (!(lambda > 0.0)) throw std::invalid_argument("lasso_lad grid oracle: lambda must be positive");

  const std::vector<double> origin(n, 0.0);
  const double x_max = lad_value(data, origin) / lambda;

  constexpr std::size_t kCoarse = 400;  // intervals per axis on the first stage
  constexpr std::size_t kFine = 40;     // intervals per axis on zoom stages
  constexpr double kZoomHalfWidth = 4.0;  // in cells of the previous stage: 8h / 40 = h / 5
  constexpr double kFinalStep = 1e-6;

  OracleSolution best;
  best.value = std::numeric_limits<double>::infinity();
  best.x.assign(n, 0.0);
  std::vector<double> lo(n, 0.0), hi(n, x_max);
  std::size_t intervals = kCoarse;
  std::vector<double> x(n);
  for (;;) {
    std::vector<double> step(n);
    for (std::size_t j = 0; j < n; ++j) step[j] = (hi[j] - lo[j]) / static_cast<double>(intervals);
    const std::size_t pts = intervals + 1;
    const std::size_t total = n == 1 ? pts : pts * pts;
    for (std::size_t p = 0; p < total; ++p) {
      x[0] = lo[0] + static_cast<double>(p % pts) * step[0];
      if (n == 2) x[1] = lo[1] + static_cast<double>(p / pts) * step[1];
      const double v = lasso_value(data, lambda, x);
      ++best.candidates;
      if (v < best.value) {
        best.value = v;
        best.x = x;
      }
    }
    const double h = *std::max_element(step.begin(), step.end());
    if (h <= kFinalStep) break;
    for (std::size_t j = 0; j < n; ++j) {
      lo[j] = std::max(0.0, best.x[j] - kZoomHalfWidth * step[j]);
      hi[j] = std::min(x_max, best.x[j] + kZoomHalfWidth * step[j]);
    }
    intervals = kFine;
  }
  return best;
}

Problem make_l1_regression(const LadData& data, std::uint64_t seed) {
  check_lad(data);
  const std::size_t n = data.cols();
  Problem p{FiniteSumObjective(lad_components(data)), Regularizer::none(), ConstraintSet::whole_space(), {},
            BlockedVector(make_layout({n}))};
  p.spec.name = "l1_regression";
  p.spec.dimension = n;
  p.spec.components = data.rows();
  p.spec.seed = seed;
  if (n <= 3 && data.rows() >= n) {
    OracleSolution sol = lad_vertex_oracle(data);
    p.spec.f_star = sol.value;
    p.spec.x_star = std::move(sol.x);
    p.spec.oracle = "vertex_enumeration";
  }
  return p;
}

Problem make_l1_regression(std::size_t m, std::size_t n, std::uint64_t seed, bool consistent) {
  if (m < n) throw std::invalid_argument("l1_regression: need m >= n");
  return make_l1_regression(generate_lad_data(m, n, seed, consistent), seed);
}

std::shared_ptr<const ReluNetOracle> make_relu_oracle(std::size_t d_in, std::size_t d_hidden, std::size_t d_out,
                                                      std::vector<double> x_data) {
  return std::make_shared<ReluNetOracle>(d_in, d_hidden, d_out, std::move(x_data));
}

Problem make_relu_net(std::size_t d_in, std::size_t d_hidden, std::size_t d_out, std::size_t samples,
                      std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("relu_net: samples must be positive");
  Rng rng(seed);
  std::vector<std::shared_ptr<const ConservativeOracle>> comps;
  comps.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    std::vector<double> data(d_in);
    for (double& v : data) v = rng.normal();
    comps.push_back(make_relu_oracle(d_in, d_hidden, d_out, std::move(data)));
  }
  FiniteSumObjective objective(std::move(comps));
  BlockedVector x0(objective.layout());
  for (double& v : x0.flat()) v = rng.normal();
  const std::size_t dim = x0.flat().size();
  Problem p{std::move(objective), Regularizer::none(), ConstraintSet::whole_space(), {}, std::move(x0)};
  p.spec.name = "relu_net";
  p.spec.dimension = dim;
  p.spec.components = samples;
  p.spec.seed = seed;
  p.spec.f_star = 0.0;
  p.spec.x_star = std::vector<double>(dim, 0.0);
  p.spec.oracle = "nonnegativity";
  return p;
}

Problem make_nonregular_scalar() {
  std::vector<std::shared_ptr<const ConservativeOracle>> comps{std::make_shared<NonregularScalarOracle>()};
  Problem p{FiniteSumObjective(std::move(comps)), Regularizer::none(), ConstraintSet::whole_space(), {},
            BlockedVector::from({2.0})};
  p.spec.name = "nonregular_scalar";
  p.spec.dimension = 1;
  p.spec.components = 1;
  p.spec.f_star = 0.75;
  p.spec.x_star = std::vector<double>{0.5};
  p.spec.oracle = "closed_form";
  return p;
}

Problem make_quadratic(std::size_t n, std::size_t components, std::uint64_t seed) {
  if (n == 0 || components == 0) throw std::invalid_argument("quadratic: n and components must be positive");
  Rng rng(seed);
  std::vector<std::vector<double>> centers(components, std::vector<double>(n, 0.0));
  if (components > 1) {
    for (auto& c : centers) {
      for (double& v : c) v = rng.normal();
    }
  }
  std::vector<double> mean(n, 0.0);
  for (const auto& c : centers) {
    for (std::size_t j = 0; j < n; ++j) mean[j] += c[j];
  }
  for (double& v : mean) v /= static_cast<double>(components);
  double spread = 0.0;
  for (const auto& c : centers) {
    for (std::size_t j = 0; j < n; ++j) spread += (c[j] - mean[j]) * (c[j] - mean[j]);
  }

  std::vector<std::shared_ptr<const ConservativeOracle>> comps;
  comps.reserve(components);
  for (auto& c : centers) comps.push_back(std::make_shared<QuadraticOracle>(std::move(c)));
  FiniteSumObjective objective(std::move(comps));
  BlockedVector x0(objective.layout(), std::vector<double>(n, 1.0));
  Problem p{std::move(objective), Regularizer::none(), ConstraintSet::whole_space(), {}, std::move(x0)};
  p.spec.name = "quadratic";
  p.spec.dimension = n;
  p.spec.components = components;
  p.spec.seed = seed;
  p.spec.f_star = 0.5 * spread / static_cast<double>(components);
  p.spec.x_star = std::move(mean);
  p.spec.oracle = "closed_form";
  return p;
}

Problem make_lasso_lad(std::size_t m, std::size_t n, double lambda, std::uint64_t seed) {
  if (m < n) throw std::invalid_argument("lasso_lad: need m >= n");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lasso_lad: lambda must be >= 0");
  const LadData data = generate_lad_data(m, n, seed);
  Problem p{FiniteSumObjective(lad_components(data)), Regularizer::l1(lambda), ConstraintSet::nonneg(), {},
            BlockedVector(make_layout({n}), std::vector<double>(n, 1.0))};
  p.spec.name = "lasso_lad";
  p.spec.dimension = n;
  p.spec.components = m;
  p.spec.seed = seed;
  if (n <= 2 && lambda > 0.0) {
    OracleSolution sol = lasso_lad_grid_oracle(data, lambda);
    p.spec.f_star = sol.value;
    p.spec.x_star = std::move(sol.x);
    p.spec.oracle = "grid_refinement";
  }
  return p;
}

}  // namespace bregsub
