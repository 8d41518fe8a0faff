// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#include "bregsub/blocked_vector.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "bregsub/error.hpp"
#include "bregsub/simd.hpp"

namespace bregsub {

Layout::Layout(std::vector<std::size_t> block_sizes, std::vector<std::string> names)
    : sizes_(std::move(block_sizes)), names_(std::move(names)) {
  offsets_.reserve(sizes_.size() + 1);
  offsets_.push_back(0);
  for (std::size_t s : sizes_) offsets_.push_back(offsets_.back() + s);
  if (names_.empty()) {
    for (std::size_t i = 0; i < sizes_.size(); ++i) names_.push_back("block" + std::to_string(i));
  } else if (names_.size() != sizes_.size()) {
    throw DimensionError("layout: " + std::to_string(names_.size()) + " names for " +
                         std::to_string(sizes_.size()) + " blocks");
  }
}

LayoutPtr make_layout(std::vector<std::size_t> block_sizes, std::vector<std::string> names) {
  return std::make_shared<const Layout>(std::move(block_sizes), std::move(names));
}

BlockedVector::BlockedVector() : layout_(make_layout({})) {}

BlockedVector::BlockedVector(LayoutPtr layout)
    : layout_(std::move(layout)), data_(layout_->total_dim(), 0.0) {}

BlockedVector::BlockedVector(LayoutPtr layout, std::vector<double> values)
    : layout_(std::move(layout)), data_(std::move(values)) {
  if (data_.size() != layout_->total_dim()) {
    throw DimensionError("BlockedVector: " + std::to_string(data_.size()) + " values for layout of dimension " +
                         std::to_string(layout_->total_dim()));
  }
}

BlockedVector BlockedVector::from(std::initializer_list<double> values) {
  return from(std::vector<double>(values));
}

BlockedVector BlockedVector::from(std::vector<double> values) {
  auto layout = make_layout({values.size()});
  return BlockedVector(std::move(layout), std::move(values));
}

std::span<double> BlockedVector::block(std::size_t i) {
  return std::span<double>(data_).subspan(layout_->offset(i), layout_->block_size(i));
}

std::span<const double> BlockedVector::block(std::size_t i) const {
  return std::span<const double>(data_).subspan(layout_->offset(i), layout_->block_size(i));
}

bool BlockedVector::same_layout(const BlockedVector& other) const {
  return layout_ == other.layout_ || *layout_ == *other.layout_;
}

void BlockedVector::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

bool BlockedVector::operator==(const BlockedVector& other) const {
  return same_layout(other) && data_ == other.data_;
}

void require_same_layout(const BlockedVector& a, const BlockedVector& b, const char* where) {
  if (a.same_layout(b)) return;
  std::ostringstream msg;
  msg << where << ": layout mismatch (dim " << a.total_dim() << " in " << a.num_blocks() << " blocks vs dim "
      << b.total_dim() << " in " << b.num_blocks() << " blocks)";
  throw DimensionError(msg.str());
}

double dot(const BlockedVector& a, const BlockedVector& b) {
  require_same_layout(a, b, "dot");
  const auto& be = simd::active();
  double s = 0.0;
  for (std::size_t i = 0; i < a.num_blocks(); ++i) {
    const auto ab = a.block(i);
    s += be.dot(ab.data(), b.block(i).data(), ab.size());
  }
  return s;
}

double squared_norm(const BlockedVector& a) {
  const auto& be = simd::active();
  double s = 0.0;
  for (std::size_t i = 0; i < a.num_blocks(); ++i) {
    const auto ab = a.block(i);
    s += be.sum_sq(ab.data(), ab.size());
  }
  return s;
}

double norm(const BlockedVector& a) { return std::sqrt(squared_norm(a)); }

double block_norm(const BlockedVector& a, std::size_t block) {
  const auto ab = a.block(block);
  return std::sqrt(simd::active().sum_sq(ab.data(), ab.size()));
}

void axpy(double alpha, const BlockedVector& x, BlockedVector& y) {
  require_same_layout(x, y, "axpy");
  simd::active().axpy(y.data(), alpha, x.data(), x.total_dim());
}

void sub_scaled(BlockedVector& out, const BlockedVector& a, double alpha, const BlockedVector& b) {
  require_same_layout(a, b, "sub_scaled");
  require_same_layout(a, out, "sub_scaled");
  simd::active().sub_scaled(out.data(), a.data(), alpha, b.data(), a.total_dim());
}

void subtract(BlockedVector& out, const BlockedVector& a, const BlockedVector& b) {
  require_same_layout(a, b, "subtract");
  require_same_layout(a, out, "subtract");
  simd::active().sub(out.data(), a.data(), b.data(), a.total_dim());
}

void scale_in_place(BlockedVector& x, double alpha) {
  simd::active().scale(x.data(), alpha, x.data(), x.total_dim());
}

BlockedVector operator-(const BlockedVector& a, const BlockedVector& b) {
  BlockedVector out = a.zeros_like();
  subtract(out, a, b);
  return out;
}

BlockedVector operator+(const BlockedVector& a, const BlockedVector& b) {
  BlockedVector out = a;
  axpy(1.0, b, out);
  return out;
}

BlockedVector operator*(double alpha, const BlockedVector& x) {
  BlockedVector out = x.zeros_like();
  simd::active().scale(out.data(), alpha, x.data(), x.total_dim());
  return out;
}

}  // namespace bregsub
