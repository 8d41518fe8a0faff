// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace bregsub {

// Partition of a flat parameter vector into L contiguous named blocks.
class Layout {
 public:
  Layout(std::vector<std::size_t> block_sizes, std::vector<std::string> names = {});

  std::size_t num_blocks() const { return sizes_.size(); }
  std::size_t total_dim() const { return offsets_.back(); }
  std::size_t block_size(std::size_t i) const { return sizes_[i]; }
  std::size_t offset(std::size_t i) const { return offsets_[i]; }
  const std::string& name(std::size_t i) const { return names_[i]; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }

  bool operator==(const Layout& other) const { return sizes_ == other.sizes_; }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<std::string> names_;
};

using LayoutPtr = std::shared_ptr<const Layout>;

LayoutPtr make_layout(std::vector<std::size_t> block_sizes, std::vector<std::string> names = {});

// Dense real vector stored contiguously and viewed through a block layout.
// Copies share the (immutable) layout.
class BlockedVector {
 public:
  BlockedVector();
  explicit BlockedVector(LayoutPtr layout);
  BlockedVector(LayoutPtr layout, std::vector<double> values);

  // Single-block vector.
  static BlockedVector from(std::initializer_list<double> values);
  static BlockedVector from(std::vector<double> values);

  const LayoutPtr& layout_ptr() const { return layout_; }
  const Layout& layout() const { return *layout_; }
  std::size_t num_blocks() const { return layout_->num_blocks(); }
  std::size_t total_dim() const { return data_.size(); }

  std::span<double> block(std::size_t i);
  std::span<const double> block(std::size_t i) const;

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](std::size_t j) { return data_[j]; }
  double operator[](std::size_t j) const { return data_[j]; }

  bool same_layout(const BlockedVector& other) const;
  void set_zero();
  BlockedVector zeros_like() const { return BlockedVector(layout_); }

  // Exact elementwise equality (used by replay and reduction checks).
  bool operator==(const BlockedVector& other) const;

 private:
  LayoutPtr layout_;
  std::vector<double> data_;
};

// Throws DimensionError naming `where` unless the layouts agree.
void require_same_layout(const BlockedVector& a, const BlockedVector& b, const char* where);

// Sum over blocks of per-block dot products.
double dot(const BlockedVector& a, const BlockedVector& b);
double squared_norm(const BlockedVector& a);
double norm(const BlockedVector& a);
double block_norm(const BlockedVector& a, std::size_t block);

void axpy(double alpha, const BlockedVector& x, BlockedVector& y);
// out = a - alpha * b
void sub_scaled(BlockedVector& out, const BlockedVector& a, double alpha, const BlockedVector& b);
// out = a - b
void subtract(BlockedVector& out, const BlockedVector& a, const BlockedVector& b);
void scale_in_place(BlockedVector& x, double alpha);

BlockedVector operator-(const BlockedVector& a, const BlockedVector& b);
BlockedVector operator+(const BlockedVector& a, const BlockedVector& b);
BlockedVector operator*(double alpha, const BlockedVector& x);

}  // namespace bregsub
