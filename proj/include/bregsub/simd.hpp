// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops over contiguous double arrays.
//
// Every backend implements the same table. Elementwise routines produce
// bit-identical results on all backends (no fused multiply-add, identical
// operation order per lane, min/max with the x86 "return second operand on
// ties" rule). Reductions (dot, sum_sq) may differ by reassociation only.

namespace bregsub::simd {

enum class Isa { scalar, avx2, neon };

struct Backend {
  Isa isa;
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_sq)(const double* a, std::size_t n);

  // y += alpha * x
  void (*axpy)(double* y, double alpha, const double* x, std::size_t n);
  // out = a - alpha * b
  void (*sub_scaled)(double* out, const double* a, double alpha, const double* b, std::size_t n);
  // out = alpha * x
  void (*scale)(double* out, double alpha, const double* x, std::size_t n);
  // out = a - b
  void (*sub)(double* out, const double* a, const double* b, std::size_t n);
  // out = a * b
  void (*mul)(double* out, const double* a, const double* b, std::size_t n);
  // out = a / b
  void (*div)(double* out, const double* a, const double* b, std::size_t n);
  // out = 1 + coeff * |x|^power, power >= 0 by repeated multiplication
  void (*poly_weight)(double* out, const double* x, double coeff, int power, std::size_t n);
  // out = clamp(copysign(max(|y| - t, 0), y), lo, hi)
  void (*soft_clamp)(double* out, const double* y, double t, double lo, double hi, std::size_t n);
};

const Backend& scalar_backend();
// nullptr when the backend was not compiled in or the CPU lacks support.
const Backend* avx2_backend();
const Backend* neon_backend();

const Backend* backend_for(Isa isa);

// Backend chosen once per process: the BREGSUB_SIMD environment variable
// (scalar | avx2 | neon | auto) wins, otherwise the widest supported ISA.
const Backend& active();

std::string_view isa_name(Isa isa);

}  // namespace bregsub::simd
