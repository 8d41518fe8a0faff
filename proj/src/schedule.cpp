// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#include "bregsub/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bregsub {
namespace {

double log_decay_factor(double arg) { return 1.0 / (1.0 + std::pow(std::log(arg), Schedule::kLogExponent)); }

}  // namespace

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::constant:
      return "constant";
    case ScheduleKind::log_decay:
      return "log_decay";
    case ScheduleKind::staged_lstm:
      return "staged_lstm";
  }
  return "unknown";
}

ScheduleKind schedule_kind_from_string(std::string_view name) {
  for (ScheduleKind k : {ScheduleKind::constant, ScheduleKind::log_decay, ScheduleKind::staged_lstm}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown schedule '" + std::string(name) + "'");
}

double Schedule::eval(std::size_t s) const {
  switch (kind) {
    case ScheduleKind::constant:
      return base;
    case ScheduleKind::log_decay:
      return base * log_decay_factor(static_cast<double>(s) + 1.0);
    case ScheduleKind::staged_lstm:
      if (s < stage1) return base;
      if (s < stage2) return 0.1 * base;
      if (s == stage2) return 0.01 * base;  // ln(0) is undefined; continuous with s = stage2 + 1
      return 0.01 * base * log_decay_factor(static_cast<double>(s - stage2));
  }
  return base;
}

double ToleranceSchedule::eval(std::size_t k) const {
  return nu0 / std::pow(1.0 + static_cast<double>(k), exponent);
}

}  // namespace bregsub
