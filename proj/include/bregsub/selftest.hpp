// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bregsub {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Quick randomized property checks of the installed library (kernel
// bijection, inverse Hessian, Bregman nonnegativity, Euclidean reduction,
// reshuffling zero-sum, SIMD agreement, trace and config round-trips).
std::vector<SelftestCheck> run_selftest(std::uint64_t seed = 1);

}  // namespace bregsub
