// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "bregsub/blocked_vector.hpp"

namespace bregsub {

struct RootSolverOptions {
  // Residual target: |t + sigma t^(r-1) - s| <= tol * (1 + s) per block,
  // scaled down by sqrt(#blocks) so the stacked residual meets tol * (1 + ||y||).
  double tol = 1e-12;
  int max_iter = 100;
};

// Below this norm a dual block is mapped straight back to the zero block.
inline constexpr double kZeroBlockNorm = 1e-300;

// Unique t >= 0 with t + sigma * t^(degree - 1) = s, for s >= 0.
// Newton from the upper end of the bracket [0, s], bisection when a step
// leaves the bracket. Throws ConvergenceError if |residual| > tol after
// max_iter iterations or if the bracket collapses first.
double solve_radial(double s, double sigma, int degree, double tol, int max_iter = 100);

struct PolyParams {
  double sigma = 0.01;
  int degree = 4;
};

// Throws std::invalid_argument for sigma < 0, non-finite sigma or degree < 4.
void validate(const PolyParams& p);

// Legendre kernel phi on R^n with the maps needed by Bregman steps.
//
// All operations are const and thread-safe. Public entry points validate the
// operand layouts (and the bound layout, when the kernel has one) and throw
// DimensionError on mismatch.
class Kernel {
 public:
  virtual ~Kernel() = default;

  virtual std::string name() const = 0;
  // True when phi(x) = sum_j psi(x_j); such kernels admit coordinatewise
  // proximal subproblems.
  virtual bool coordinate_separable() const = 0;

  // Layout the kernel was configured for; null accepts any layout.
  const LayoutPtr& bound_layout() const { return layout_; }

  double value(const BlockedVector& x) const;
  void grad(const BlockedVector& x, BlockedVector& out) const;
  BlockedVector grad(const BlockedVector& x) const;
  // (grad phi)^{-1}; for polynomial kernels a safeguarded scalar root solve per block.
  void grad_conj(const BlockedVector& y, BlockedVector& out) const;
  BlockedVector grad_conj(const BlockedVector& y) const;
  // D(x, y) = phi(x) - phi(y) - <grad phi(y), x - y>
  double bregman(const BlockedVector& x, const BlockedVector& y) const;
  void hessian_apply(const BlockedVector& x, const BlockedVector& v, BlockedVector& out) const;
  BlockedVector hessian_apply(const BlockedVector& x, const BlockedVector& v) const;
  void inv_hessian_apply(const BlockedVector& x, const BlockedVector& v, BlockedVector& out) const;
  BlockedVector inv_hessian_apply(const BlockedVector& x, const BlockedVector& v) const;

  const RootSolverOptions& root_options() const { return root_; }

 protected:
  Kernel(LayoutPtr layout, RootSolverOptions root) : layout_(std::move(layout)), root_(root) {}

 private:
  void check(const BlockedVector& x, const char* where) const;

  virtual double do_value(const BlockedVector& x) const = 0;
  virtual void do_grad(const BlockedVector& x, BlockedVector& out) const = 0;
  virtual void do_grad_conj(const BlockedVector& y, BlockedVector& out) const = 0;
  virtual double do_bregman(const BlockedVector& x, const BlockedVector& y) const;
  virtual void do_hessian_apply(const BlockedVector& x, const BlockedVector& v, BlockedVector& out) const = 0;
  virtual void do_inv_hessian_apply(const BlockedVector& x, const BlockedVector& v, BlockedVector& out) const = 0;

  LayoutPtr layout_;
  RootSolverOptions root_;
};

// phi(x) = 1/2 ||x||^2: every map is the identity, the Bregman distance is
// the squared Euclidean distance.
class EuclideanKernel final : public Kernel {
 public:
  explicit EuclideanKernel(LayoutPtr layout = nullptr) : Kernel(std::move(layout), {}) {}

  std::string name() const override { return "euclidean"; }
  bool coordinate_separable() const override { return true; }

 private:
  double do_value(const BlockedVector& x) const override;
  void do_grad(const BlockedVector& x, BlockedVector& out) const override;
  void do_grad_conj(const BlockedVector& y, BlockedVector& out) const override;
  double do_bregman(const BlockedVector& x, const BlockedVector& y) const override;
  void do_hessian_apply(const BlockedVector& x, const BlockedVector& v, BlockedVector& out) const override;
  void do_inv_hessian_apply(const BlockedVector& x, const BlockedVector& v, BlockedVector& out) const override;
};

// phi(x) = sum_i p_i(||x_i||), p_i(t) = t^2/2 + (sigma_i/r_i) t^(r_i).
//
// grad phi acts blockwise as (1 + sigma t^(r-2)) x_i. The block Hessian is
//   a I + b x_i x_i^T,  a = 1 + sigma t^(r-2),  b = sigma (r-2) t^(r-4),
// and its inverse is applied via Sherman-Morrison:
//   (1/a) I - b / (a (a + b t^2)) x_i x_i^T.
class BlockPolynomialKernel final : public Kernel {
 public:
  // Shared parameters for every block of any layout.
  explicit BlockPolynomialKernel(PolyParams shared, LayoutPtr layout = nullptr, RootSolverOptions root = {});
  // One parameter pair per block of `layout`.
  BlockPolynomialKernel(std::vector<PolyParams> per_block, LayoutPtr layout, RootSolverOptions root = {});

  std::string name() const override { return "block_poly"; }
  bool coordinate_separable() const override { return false; }
  const PolyParams& params(std::size_t block) const;

 private:
  double do_value(const BlockedVector& x) const override;
  void do_grad(const BlockedVector& x, BlockedVector& out) const override;
  void do_grad_conj(const BlockedVector& y, BlockedVector& out) const override;
  double do_bregman(const BlockedVector& x, const BlockedVector& y) const override;
  void do_hessian_apply(const BlockedVector& x, const BlockedVector& v, BlockedVector& out) const override;
  void do_inv_hessian_apply(const BlockedVector& x, const BlockedVector& v, BlockedVector& out) const override;

  std::vector<PolyParams> params_;
};

// phi(x) = sum_j (x_j^2/2 + (sigma/r)|x_j|^r), fully separable.
class CoordPolynomialKernel final : public Kernel {
 public:
  explicit CoordPolynomialKernel(PolyParams params, LayoutPtr layout = nullptr, RootSolverOptions root = {});

  std::string name() const override { return "coord_poly"; }
  bool coordinate_separable() const override { return true; }
  const PolyParams& params() const { return params_; }

 private:
  double do_value(const BlockedVector& x) const override;
  void do_grad(const BlockedVector& x, BlockedVector& out) const override;
  void do_grad_conj(const BlockedVector& y, BlockedVector& out) const override;
  void do_hessian_apply(const BlockedVector& x, const BlockedVector& v, BlockedVector& out) const override;
  void do_inv_hessian_apply(const BlockedVector& x, const BlockedVector& v, BlockedVector& out) const override;

  PolyParams params_;
};

enum class KernelKind { euclidean, block_poly, coord_poly };

std::string_view to_string(KernelKind kind);
KernelKind kernel_kind_from_string(std::string_view name);

struct KernelSpec {
  KernelKind kind = KernelKind::euclidean;
  double sigma = 0.01;
  int degree = 4;

  bool operator==(const KernelSpec&) const = default;
};

std::unique_ptr<Kernel> make_kernel(const KernelSpec& spec, LayoutPtr layout = nullptr);

}  // namespace bregsub
