// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace bregsub {

// Seeded generator with a platform-independent stream.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard distributions are not (they differ between
// standard libraries), so the derived draws are implemented here:
//   uniform_index: rejection sampling on the top of the 64-bit range
//   uniform01:     top 53 bits scaled by 2^-53, in [0, 1)
//   normal:        Box-Muller, both variates used in turn
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on {0, ..., n-1}; n >= 1.
  std::uint64_t uniform_index(std::uint64_t n);
  double uniform01();
  double normal();

  bool operator==(const Rng&) const = default;

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bregsub
