// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string_view>

namespace bregsub {

enum class ScheduleKind { constant, log_decay, staged_lstm };

std::string_view to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(std::string_view name);

// Step-size / momentum sequence indexed by a counter s (the epoch by default).
//
//   constant:     base
//   log_decay:    base / (1 + (ln(s + 1))^1.1)
//   staged_lstm:  base for s < stage1, 0.1 base for stage1 <= s < stage2,
//                 0.01 base / (1 + (ln(s - stage2))^1.1) for s > stage2 and
//                 0.01 base at s = stage2 itself
//
// With per_epoch set (the default) the value is held fixed over each epoch;
// otherwise the iteration counter drives the sequence.
struct Schedule {
  ScheduleKind kind = ScheduleKind::log_decay;
  double base = 0.1;
  std::size_t stage1 = 150;
  std::size_t stage2 = 300;
  bool per_epoch = true;

  static constexpr double kLogExponent = 1.1;

  double eval(std::size_t s) const;
  double at(std::size_t iteration, std::size_t epoch) const { return eval(per_epoch ? epoch : iteration); }

  bool operator==(const Schedule&) const = default;
};

// nu_k = nu0 / (1 + k)^exponent.
struct ToleranceSchedule {
  double nu0 = 1e-4;
  double exponent = 0.6;

  double eval(std::size_t k) const;

  bool operator==(const ToleranceSchedule&) const = default;
};

}  // namespace bregsub
