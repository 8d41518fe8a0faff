// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace bregsub {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand layouts or dimensions disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An iterative solver hit its cap without meeting its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// A subproblem solution failed its nu-optimality or sufficient-decrease check.
class CertificateError : public Error {
 public:
  using Error::Error;
};

// Kernel / regularizer / constraint combination without a certified solver.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace bregsub
