// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#include "bregsub/trace.hpp"

#include <array>
#include <charconv>
#include <stdexcept>
#include <system_error>

namespace bregsub {
namespace {

template <typename T>
T parse_field(std::string_view field, std::string_view line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw std::runtime_error("trace: bad field '" + std::string(field) + "' in row '" + std::string(line) + "'");
  }
  return v;
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

std::string_view without_last_column(std::string_view line) {
  const auto pos = line.rfind(',');
  return pos == std::string_view::npos ? line : line.substr(0, pos);
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

std::string format_record(const TraceRecord& r) {
  std::string s;
  s.reserve(200);
  s += std::to_string(r.iter);
  s += ',';
  s += std::to_string(r.epoch);
  for (double v : {r.eta, r.theta, r.f_value, r.m_norm, r.dual_step_norm, r.cert_residual, r.stationarity_proxy}) {
    s += ',';
    s += format_double(v);
  }
  s += ',';
  s += std::to_string(r.wall_ns);
  return s;
}

TraceRecord parse_record(std::string_view line) {
  line = strip_cr(line);
  std::array<std::string_view, 10> f{};
  std::size_t count = 0;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (count == f.size()) throw std::runtime_error("trace: too many columns in '" + std::string(line) + "'");
    f[count++] = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (count != f.size()) throw std::runtime_error("trace: expected 10 columns in '" + std::string(line) + "'");
  TraceRecord r;
  r.iter = parse_field<std::uint64_t>(f[0], line);
  r.epoch = parse_field<std::uint64_t>(f[1], line);
  r.eta = parse_field<double>(f[2], line);
  r.theta = parse_field<double>(f[3], line);
  r.f_value = parse_field<double>(f[4], line);
  r.m_norm = parse_field<double>(f[5], line);
  r.dual_step_norm = parse_field<double>(f[6], line);
  r.cert_residual = parse_field<double>(f[7], line);
  r.stationarity_proxy = parse_field<double>(f[8], line);
  r.wall_ns = parse_field<std::int64_t>(f[9], line);
  return r;
}

CsvTraceWriter::CsvTraceWriter(const std::filesystem::path& path, std::size_t flush_every)
    : out_(path, std::ios::out | std::ios::trunc), flush_every_(flush_every == 0 ? 1 : flush_every) {
  if (!out_) throw std::runtime_error("cannot open trace file " + path.string());
  out_ << kTraceHeader << '\n';
  out_.flush();
}

CsvTraceWriter::~CsvTraceWriter() { out_.flush(); }

void CsvTraceWriter::write(const TraceRecord& record) {
  out_ << format_record(record) << '\n';
  if (++pending_ >= flush_every_) flush();
}

void CsvTraceWriter::flush() {
  out_.flush();
  pending_ = 0;
}

std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file " + path.string());
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kTraceHeader) {
    throw std::runtime_error("trace " + path.string() + ": header must be exactly '" + std::string(kTraceHeader) + "'");
  }
  std::vector<TraceRecord> rows;
  while (std::getline(in, line)) {
    if (strip_cr(line).empty()) continue;
    rows.push_back(parse_record(line));
  }
  return rows;
}

TraceDiff diff_trace_files(const std::filesystem::path& a, const std::filesystem::path& b, bool ignore_wall_ns) {
  std::ifstream ia(a);
  std::ifstream ib(b);
  if (!ia) throw std::runtime_error("cannot open " + a.string());
  if (!ib) throw std::runtime_error("cannot open " + b.string());
  std::string la;
  std::string lb;
  std::size_t line = 0;
  while (true) {
    const bool ga = static_cast<bool>(std::getline(ia, la));
    const bool gb = static_cast<bool>(std::getline(ib, lb));
    ++line;
    if (!ga && !gb) return {};
    if (ga != gb) return {false, line, "traces differ in length"};
    std::string_view va = strip_cr(la);
    std::string_view vb = strip_cr(lb);
    if (ignore_wall_ns && line > 1) {
      va = without_last_column(va);
      vb = without_last_column(vb);
    }
    if (va != vb) return {false, line, "'" + std::string(va) + "' vs '" + std::string(vb) + "'"};
  }
}

}  // namespace bregsub
