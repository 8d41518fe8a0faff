// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <cstring>
#include <string_view>

#include "bregsub/simd.hpp"

namespace bregsub::simd {

#if defined(BREGSUB_HAVE_AVX2)
const Backend& avx2_table();
#endif
#if defined(__aarch64__) && defined(__ARM_NEON)
const Backend& neon_table();
#endif

const Backend* avx2_backend() {
#if defined(BREGSUB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const Backend* neon_backend() {
#if defined(__aarch64__) && defined(__ARM_NEON)
  return &neon_table();
#else
  return nullptr;
#endif
}

const Backend* backend_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &scalar_backend();
    case Isa::avx2:
      return avx2_backend();
    case Isa::neon:
      return neon_backend();
  }
  return nullptr;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

namespace {

const Backend& select() {
  const char* env = std::getenv("BREGSUB_SIMD");
  if (env != nullptr && std::strcmp(env, "auto") != 0) {
    const std::string_view want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == isa_name(isa)) {
        if (const Backend* b = backend_for(isa)) return *b;
      }
    }
    // Unsupported request falls through to autodetection.
  }
  if (const Backend* b = avx2_backend()) return *b;
  if (const Backend* b = neon_backend()) return *b;
  return scalar_backend();
}

}  // namespace

const Backend& active() {
  static const Backend& chosen = select();
  return chosen;
}

}  // namespace bregsub::simd
