// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

// AArch64 Advanced SIMD backend, two double lanes per register.

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

#include <cmath>
#include <cstddef>

#include "bregsub/simd.hpp"

namespace bregsub::simd {
namespace {

// vmaxq_f64 orders signed zeros; compare-and-select keeps x86 tie semantics.
inline float64x2_t max_like_x86(float64x2_t a, float64x2_t b) { return vbslq_f64(vcgtq_f64(a, b), a, b); }
inline float64x2_t min_like_x86(float64x2_t a, float64x2_t b) { return vbslq_f64(vcltq_f64(a, b), a, b); }

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  const float64x2_t acc = vaddq_f64(acc0, acc1);
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_sq(const double* a, std::size_t n) { return dot(a, a, n); }

void axpy(double* y, double alpha, const double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void sub_scaled(double* out, const double* a, double alpha, const double* b, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vsubq_f64(vld1q_f64(a + i), vmulq_f64(va, vld1q_f64(b + i))));
  for (; i < n; ++i) out[i] = a[i] - alpha * b[i];
}

void scale(double* out, double alpha, const double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(va, vld1q_f64(x + i)));
  for (; i < n; ++i) out[i] = alpha * x[i];
}

void sub(double* out, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul(double* out, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void div(double* out, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vdivq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] / b[i];
}

void poly_weight(double* out, const double* x, double coeff, int power, std::size_t n) {
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t vc = vdupq_n_f64(coeff);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t a = vabsq_f64(vld1q_f64(x + i));
    float64x2_t acc = one;
    for (int p = 0; p < power; ++p) acc = vmulq_f64(acc, a);
    vst1q_f64(out + i, vaddq_f64(one, vmulq_f64(vc, acc)));
  }
  for (; i < n; ++i) {
    const double a = std::fabs(x[i]);
    double acc = 1.0;
    for (int p = 0; p < power; ++p) acc = acc * a;
    out[i] = 1.0 + coeff * acc;
  }
}

void soft_clamp(double* out, const double* y, double t, double lo, double hi, std::size_t n) {
  const float64x2_t vt = vdupq_n_f64(t);
  const float64x2_t vlo = vdupq_n_f64(lo);
  const float64x2_t vhi = vdupq_n_f64(hi);
  const float64x2_t zero = vdupq_n_f64(0.0);
  const uint64x2_t sign = vdupq_n_u64(0x8000000000000000ULL);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vy = vld1q_f64(y + i);
    const float64x2_t m = max_like_x86(vsubq_f64(vabsq_f64(vy), vt), zero);
    const uint64x2_t bits = vorrq_u64(vreinterpretq_u64_f64(m), vandq_u64(vreinterpretq_u64_f64(vy), sign));
    float64x2_t v = max_like_x86(vreinterpretq_f64_u64(bits), vlo);
    vst1q_f64(out + i, min_like_x86(v, vhi));
  }
  for (; i < n; ++i) {
    const double d = std::fabs(y[i]) - t;
    const double m = d > 0.0 ? d : 0.0;
    double v = std::copysign(m, y[i]);
    v = v > lo ? v : lo;
    out[i] = v < hi ? v : hi;
  }
}

constexpr Backend kNeon{Isa::neon, "neon", dot,  sum_sq,      axpy,       sub_scaled,
                        scale,     sub,    mul,  div,         poly_weight, soft_clamp};

}  // namespace

const Backend& neon_table() { return kNeon; }

}  // namespace bregsub::simd

#endif
