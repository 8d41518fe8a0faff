// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#include "bregsub/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "bregsub/diagnostics.hpp"
#include "bregsub/trace.hpp"

namespace bregsub {
namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

int exit_code_for(RunStatus status) {
  switch (status) {
    case RunStatus::completed:
    case RunStatus::target_reached:
      return kExitOk;
    case RunStatus::certificate_failure:
      return kExitCertificate;
    case RunStatus::solver_failure:
      return kExitSolver;
  }
  return kExitSolver;
}

ExperimentOutcome execute_into(const ExperimentConfig& config, TraceSink* sink) {
  validate(config);
  Problem problem = build_problem(config.problem);
  const auto kernel = make_kernel(config.kernel, problem.objective.layout());
  Sampler sampler(config.sampler.mode, problem.objective.size(), config.sampler.seed, config.sampler.batch);
  const RunSettings settings = to_run_settings(config);

  ExperimentOutcome out;
  out.result = run(problem.objective, *kernel, sampler, std::move(problem.x0), settings, sink);
  out.spec = std::move(problem.spec);
  out.final_f = out.result.trace.back().f_value;
  if (out.spec.f_star) out.oracle_gap = out.final_f - *out.spec.f_star;
  out.exit_code = exit_code_for(out.result.status);
  return out;
}

std::string eta_dir_name(double eta0) {
  std::string s = format_double(eta0);
  std::replace(s.begin(), s.end(), '-', 'm');
  return "eta0_" + s;
}

}  // namespace

Problem build_problem(const ProblemConfig& c) {
  if (c.name == "l1_regression") return make_l1_regression(c.m, c.n, c.data_seed, c.consistent);
  if (c.name == "lasso_lad") return make_lasso_lad(c.m, c.n, c.lambda, c.data_seed);
  if (c.name == "relu_net") return make_relu_net(c.d_in, c.d_hidden, c.d_out, c.samples, c.data_seed);
  if (c.name == "nonregular_scalar") return make_nonregular_scalar();
  if (c.name == "quadratic") return make_quadratic(c.n, c.components, c.data_seed);
  throw std::invalid_argument("unknown problem '" + c.name + "'");
}

ExperimentOutcome execute(const ExperimentConfig& config) { return execute_into(config, nullptr); }

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  validate(config);
  const fs::path dir = config.output.dir;
  fs::create_directories(dir);
  write_file(dir / "config_echo.ini", config_echo(config));
  ExperimentOutcome out;
  {
    CsvTraceWriter writer(dir / "trace.csv");
    out = execute_into(config, &writer);
  }
  write_file(dir / "summary.txt", format_summary(config, out));
  return out;
}

std::string format_summary(const ExperimentConfig& config, const ExperimentOutcome& o) {
  const RunResult& r = o.result;
  std::ostringstream s;
  s << "problem: " << o.spec.name << '\n';
  s << "method: " << to_string(config.optimizer.method) << '\n';
  s << "kernel: " << to_string(config.kernel.kind) << '\n';
  s << "seed: " << config.sampler.seed << '\n';
  s << "status: " << to_string(r.status) << '\n';
  s << "iterations: " << r.iterations << '\n';
  s << "final_f: " << format_double(o.final_f) << '\n';
  s << "best_f: " << format_double(r.best_value) << '\n';
  s << "oracle: " << o.spec.oracle << '\n';
  if (o.spec.f_star) {
    s << "f_star: " << format_double(*o.spec.f_star) << '\n';
    s << "oracle_gap: " << format_double(*o.oracle_gap) << '\n';
  } else {
    s << "oracle_gap: unavailable\n";
  }
  s << "final_m_norm: " << format_double(norm(r.state.m)) << '\n';
  s << "max_cert_residual: " << format_double(r.max_cert_residual) << '\n';
  s << "certificate_status: " << (r.status == RunStatus::certificate_failure ? "failed" : "ok") << '\n';
  if (!r.message.empty()) s << "message: " << r.message << '\n';
  for (const auto& w : r.warnings) s << "warning: " << w << '\n';
  return s.str();
}

SweepReport sweep(const ExperimentConfig& base, const SweepOptions& options) {
  if (options.seeds.empty()) throw std::invalid_argument("sweep: at least one seed is required");
  const std::vector<double> grid = options.eta0_grid.empty() ? std::vector<double>{base.optimizer.eta0}
                                                             : options.eta0_grid;
  const fs::path root = base.output.dir;

  SweepReport report;
  for (double eta0 : grid) {
    for (std::uint64_t seed : options.seeds) {
      SweepCell cell;
      cell.eta0 = eta0;
      cell.seed = seed;
      cell.dir = root / eta_dir_name(eta0) / ("seed_" + std::to_string(seed));
      report.cells.push_back(std::move(cell));
    }
  }

  const auto run_cell = [&base](SweepCell& cell) {
    try {
      ExperimentConfig cfg = base;
      cfg.optimizer.eta0 = cell.eta0;
      cfg.sampler.seed = cell.seed;
      cfg.output.dir = cell.dir.string();
      const ExperimentOutcome out = run_experiment(cfg);
      cell.exit_code = out.exit_code;
      cell.error = out.result.message;
      cell.final_f = out.final_f;
      cell.best_f = out.result.best_value;
      cell.oracle_gap = out.oracle_gap;
    } catch (const ConfigError& e) {
      cell.exit_code = kExitConfig;
      cell.error = e.what();
    } catch (const std::exception& e) {
      cell.exit_code = kExitSolver;
      cell.error = e.what();
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(report.cells.size())));
  if (jobs == 1) {
    for (auto& cell : report.cells) run_cell(cell);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < report.cells.size(); i = next++) run_cell(report.cells[i]);
      });
    }
  }

  for (double eta0 : grid) {
    SweepAggregate agg;
    agg.eta0 = eta0;
    double sum = 0.0;
    std::size_t ok = 0;
    for (const auto& c : report.cells) {
      if (c.eta0 != eta0) continue;
      ++agg.runs;
      if (!c.ok()) {
        ++agg.failed;
        continue;
      }
      agg.final_f_min = ok == 0 ? c.final_f : std::min(agg.final_f_min, c.final_f);
      agg.final_f_max = ok == 0 ? c.final_f : std::max(agg.final_f_max, c.final_f);
      sum += c.final_f;
      ++ok;
    }
    if (ok > 0) {
      agg.final_f_mean = sum / static_cast<double>(ok);
    } else {
      agg.final_f_mean = agg.final_f_min = agg.final_f_max = std::nan("");
    }
    report.aggregates.push_back(agg);
    if (agg.failed > 0) report.exit_code = kExitSweepFailures;
  }

  fs::create_directories(root);
  std::ostringstream runs;
  runs << "eta0,seed,status,exit_code,final_f,best_f,oracle_gap,dir,error\n";
  for (const auto& c : report.cells) {
    std::string err = c.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    runs << format_double(c.eta0) << ',' << c.seed << ',' << (c.ok() ? "ok" : "failed") << ',' << c.exit_code << ','
         << (c.ok() ? format_double(c.final_f) : "") << ',' << (c.ok() ? format_double(c.best_f) : "") << ','
         << (c.oracle_gap && c.ok() ? format_double(*c.oracle_gap) : "") << ',' << c.dir.generic_string() << ','
         << err << '\n';
  }
  write_file(root / "sweep_runs.csv", runs.str());

  std::ostringstream summary;
  summary << "eta0,runs,failed,final_f_mean,final_f_min,final_f_max\n";
  for (const auto& a : report.aggregates) {
    summary << format_double(a.eta0) << ',' << a.runs << ',' << a.failed << ',' << format_double(a.final_f_mean)
            << ',' << format_double(a.final_f_min) << ',' << format_double(a.final_f_max) << '\n';
  }
  write_file(root / "sweep_summary.csv", summary.str());
  return report;
}

std::string diagnose_file(const fs::path& trace_path) {
  const std::vector<TraceRecord> trace = read_trace_csv(trace_path);
  const std::string text = format_report(diagnose_trace(trace));
  fs::path out = trace_path;
  out += ".report.txt";
  write_file(out, text);
  return text;
}

}  // namespace bregsub
