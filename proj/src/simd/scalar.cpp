// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstddef>

#include "bregsub/simd.hpp"

namespace bregsub::simd {
namespace {

// Tie semantics match _mm256_max_pd / _mm256_min_pd (second operand wins).
inline double max_like_x86(double a, double b) { return a > b ? a : b; }
inline double min_like_x86(double a, double b) { return a < b ? a : b; }

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_sq(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

void axpy(double* y, double alpha, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void sub_scaled(double* out, const double* a, double alpha, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - alpha * b[i];
}

void scale(double* out, double alpha, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = alpha * x[i];
}

void sub(double* out, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void mul(double* out, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void div(double* out, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] / b[i];
}

void poly_weight(double* out, const double* x, double coeff, int power, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::fabs(x[i]);
    double acc = 1.0;
    for (int p = 0; p < power; ++p) acc = acc * a;
    out[i] = 1.0 + coeff * acc;
  }
}

void soft_clamp(double* out, const double* y, double t, double lo, double hi, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double m = max_like_x86(std::fabs(y[i]) - t, 0.0);
    double v = std::copysign(m, y[i]);
    v = max_like_x86(v, lo);
    out[i] = min_like_x86(v, hi);
  }
}

constexpr Backend kScalar{Isa::scalar, "scalar", dot,  sum_sq,      axpy,      sub_scaled,
                          scale,       sub,      mul,  div,         poly_weight, soft_clamp};

}  // namespace

const Backend& scalar_backend() { return kScalar; }

}  // namespace bregsub::simd
