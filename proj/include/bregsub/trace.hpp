// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace bregsub {

// One row of trace.csv.
struct TraceRecord {
  std::uint64_t iter = 0;
  std::uint64_t epoch = 0;
  double eta = 0.0;
  double theta = 0.0;
  double f_value = 0.0;
  double m_norm = 0.0;
  // ||grad phi(x_{k+1}) - grad phi(x_k)|| / eta_k
  double dual_step_norm = 0.0;
  double cert_residual = 0.0;
  double stationarity_proxy = 0.0;
  std::int64_t wall_ns = 0;

  bool operator==(const TraceRecord&) const = default;
};

inline constexpr std::string_view kTraceHeader =
    "iter,epoch,eta,theta,f_value,m_norm,dual_step_norm,cert_residual,stationarity_proxy,wall_ns";

// Shortest-round-trip-safe, locale-independent rendering with 17 significant digits.
std::string format_double(double v);
std::string format_record(const TraceRecord& r);
// Throws std::runtime_error on malformed rows.
TraceRecord parse_record(std::string_view line);

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void write(const TraceRecord& record) = 0;
  virtual void flush() = 0;
};

// Appends rows to a CSV file, flushing every `flush_every` records and on destruction.
class CsvTraceWriter final : public TraceSink {
 public:
  explicit CsvTraceWriter(const std::filesystem::path& path, std::size_t flush_every = 100);
  ~CsvTraceWriter() override;

  void write(const TraceRecord& record) override;
  void flush() override;

 private:
  std::ofstream out_;
  std::size_t flush_every_;
  std::size_t pending_ = 0;
};

// Reads a trace written by CsvTraceWriter; the header must match exactly.
std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path);

struct TraceDiff {
  bool equal = true;
  std::size_t line = 0;  // first differing line (1-based), 0 when equal
  std::string detail;
};

// Line-by-line comparison. With ignore_wall_ns (the default) the wall_ns
// column is dropped before comparing, since it is the only field that is not
// a deterministic function of config and seed.
TraceDiff diff_trace_files(const std::filesystem::path& a, const std::filesystem::path& b,
                           bool ignore_wall_ns = true);

}  // namespace bregsub
