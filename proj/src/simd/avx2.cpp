// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mavx2 (and without -mfma). Keep this translation unit free of
// inline standard-library templates so no AVX2-encoded copy of a shared
// inline function can win at link time.

#include <immintrin.h>

#include <cstddef>

#include "bregsub/simd.hpp"

namespace bregsub::simd {
namespace {

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

inline double fabs_scalar(double v) { return v < 0.0 || (v == 0.0 && 1.0 / v < 0.0) ? -v : v; }

inline double hsum(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_sq(const double* a, std::size_t n) { return dot(a, a, n); }

void axpy(double* y, double alpha, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void sub_scaled(double* out, const double* a, double alpha, const double* b, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), prod));
  }
  for (; i < n; ++i) out[i] = a[i] - alpha * b[i];
}

void scale(double* out, double alpha, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = alpha * x[i];
}

void sub(double* out, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul(double* out, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void div(double* out, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] / b[i];
}

void poly_weight(double* out, const double* x, double coeff, int power, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d vc = _mm256_set1_pd(coeff);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = abs_pd(_mm256_loadu_pd(x + i));
    __m256d acc = one;
    for (int p = 0; p < power; ++p) acc = _mm256_mul_pd(acc, a);
    _mm256_storeu_pd(out + i, _mm256_add_pd(one, _mm256_mul_pd(vc, acc)));
  }
  for (; i < n; ++i) {
    const double a = fabs_scalar(x[i]);
    double acc = 1.0;
    for (int p = 0; p < power; ++p) acc = acc * a;
    out[i] = 1.0 + coeff * acc;
  }
}

void soft_clamp(double* out, const double* y, double t, double lo, double hi, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d vt = _mm256_set1_pd(t);
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    const __m256d m = _mm256_max_pd(_mm256_sub_pd(abs_pd(vy), vt), zero);
    __m256d v = _mm256_or_pd(m, _mm256_and_pd(vy, sign));
    v = _mm256_max_pd(v, vlo);
    _mm256_storeu_pd(out + i, _mm256_min_pd(v, vhi));
  }
  for (; i < n; ++i) {
    const double d = fabs_scalar(y[i]) - t;
    const double m = d > 0.0 ? d : 0.0;
    const bool negative = y[i] < 0.0 || (y[i] == 0.0 && 1.0 / y[i] < 0.0);
    double v = negative ? -m : m;
    v = v > lo ? v : lo;
    out[i] = v < hi ? v : hi;
  }
}

constexpr Backend kAvx2{Isa::avx2, "avx2", dot,  sum_sq,      axpy,       sub_scaled,
                        scale,     sub,    mul,  div,         poly_weight, soft_clamp};

}  // namespace

const Backend& avx2_table() { return kAvx2; }

}  // namespace bregsub::simd
