// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#include "bregsub/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "bregsub/trace.hpp"

namespace bregsub {
namespace {

constexpr std::string_view kProblemNames[] = {"l1_regression", "lasso_lad", "relu_net", "nonregular_scalar",
                                              "quadratic"};

struct Entry {
  std::string key;
  std::string value;
  std::size_t line;
};

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r'; };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end && std::isfinite(out);
}

template <class U>
bool parse_unsigned(std::string_view s, U& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

bool parse_bool(std::string_view s, bool& out) {
  if (s == "true") {
    out = true;
    return true;
  }
  if (s == "false") {
    out = false;
    return true;
  }
  return false;
}

ProblemConfig problem_defaults(std::string_view name) {
  ProblemConfig p;
  p.name = std::string(name);
  if (name == "lasso_lad") {
    p.m = 20;
    p.data_seed = 3;
  }
  return p;
}

std::vector<std::string_view> problem_keys(std::string_view name) {
  if (name == "l1_regression") return {"m", "n", "data_seed", "consistent"};
  if (name == "lasso_lad") return {"m", "n", "lambda", "data_seed"};
  if (name == "relu_net") return {"d_in", "d_hidden", "d_out", "samples", "data_seed"};
  if (name == "quadratic") return {"n", "components", "data_seed"};
  return {};
}

bool contains(const std::vector<std::string_view>& keys, std::string_view k) {
  return std::find(keys.begin(), keys.end(), k) != keys.end();
}

// Binds one section's keys to typed setters and records applicability.
class SectionReader {
 public:
  SectionReader(std::string section, std::vector<std::string>& errors) : section_(std::move(section)), errors_(errors) {}

  using Setter = std::function<bool(std::string_view)>;

  void bind(std::string_view key, bool applicable, std::string why, Setter setter) {
    slots_[std::string(key)] = {applicable, std::move(why), std::move(setter)};
  }

  void read(const std::vector<Entry>& entries) {
    for (const Entry& e : entries) {
      const std::string where = "line " + std::to_string(e.line) + ": [" + section_ + "] " + e.key;
      auto it = slots_.find(e.key);
      if (it == slots_.end()) {
        errors_.push_back(where + ": unknown key");
      } else if (!it->second.applicable) {
        errors_.push_back(where + ": not applicable (" + it->second.why + ")");
      } else if (!it->second.setter(e.value)) {
        errors_.push_back(where + ": invalid value '" + e.value + "'");
      }
    }
  }

 private:
  struct Slot {
    bool applicable = true;
    std::string why;
    Setter setter;
  };
  std::string section_;
  std::vector<std::string>& errors_;
  std::map<std::string, Slot> slots_;
};

SectionReader::Setter set_double(double& out) {
  return [&out](std::string_view s) { return parse_double(s, out); };
}
template <class U>
SectionReader::Setter set_unsigned(U& out) {
  return [&out](std::string_view s) { return parse_unsigned(s, out); };
}
SectionReader::Setter set_bool(bool& out) {
  return [&out](std::string_view s) { return parse_bool(s, out); };
}
template <class E>
SectionReader::Setter set_enum(E& out, E (*from)(std::string_view)) {
  return [&out, from](std::string_view s) {
    try {
      out = from(s);
      return true;
    } catch (const std::invalid_argument&) {
      return false;
    }
  };
}

std::string_view lookup(const std::vector<Entry>& entries, std::string_view key) {
  for (const Entry& e : entries) {
    if (e.key == key) return e.value;
  }
  return {};
}

bool is_composite(const CompositeConfig& c) {
  return c.regularizer != RegularizerKind::zero || c.constraint != ConstraintKind::whole_space;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : Error([&] {
        std::string msg = "invalid config (" + std::to_string(errors.size()) + " error" +
                          (errors.size() == 1 ? "" : "s") + ")";
        for (const auto& e : errors) msg += "\n  " + e;
        return msg;
      }()),
      errors_(std::move(errors)) {}

ExperimentConfig parse_config_text(std::string_view text) {
  std::vector<std::string> errors;
  std::map<std::string, std::vector<Entry>> sections;
  const std::set<std::string> known = {"problem", "kernel", "optimizer", "composite", "sampler", "output"};

  std::string current;
  bool skipping = false;  // inside an unknown or malformed section, already reported
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    const std::string where = "line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(where + ": malformed section header");
        current.clear();
        skipping = true;
        continue;
      }
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known.contains(current)) {
        errors.push_back(where + ": unknown section [" + current + "]");
        current.clear();
        skipping = true;
        continue;
      }
      if (sections.contains(current)) errors.push_back(where + ": duplicate section [" + current + "]");
      sections[current];
      skipping = false;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back(where + ": expected key = value, got '" + std::string(line) + "'");
      continue;
    }
    if (current.empty()) {
      if (!skipping) errors.push_back(where + ": key before any section header");
      continue;
    }
    Entry e{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no};
    auto& list = sections[current];
    if (std::any_of(list.begin(), list.end(), [&](const Entry& o) { return o.key == e.key; })) {
      errors.push_back(where + ": duplicate key " + e.key);
      continue;
    }
    list.push_back(std::move(e));
  }

  ExperimentConfig cfg;
  const auto section = [&](const std::string& name) -> const std::vector<Entry>& {
    static const std::vector<Entry> empty;
    auto it = sections.find(name);
    return it == sections.end() ? empty : it->second;
  };

  // Selector keys first: they decide which other keys apply.
  {
    const std::string_view name = lookup(section("problem"), "name");
    if (!name.empty()) {
      if (std::find(std::begin(kProblemNames), std::end(kProblemNames), name) == std::end(kProblemNames)) {
        errors.push_back("[problem] name: unknown problem '" + std::string(name) + "'");
      } else {
        cfg.problem = problem_defaults(name);
      }
    }
  }

  {
    SectionReader r("problem", errors);
    const auto keys = problem_keys(cfg.problem.name);
    const std::string why = "problem " + cfg.problem.name;
    ProblemConfig& p = cfg.problem;
    r.bind("name", true, "", [](std::string_view) { return true; });
    r.bind("m", contains(keys, "m"), why, set_unsigned(p.m));
    r.bind("n", contains(keys, "n"), why, set_unsigned(p.n));
    r.bind("lambda", contains(keys, "lambda"), why, set_double(p.lambda));
    r.bind("data_seed", contains(keys, "data_seed"), why, set_unsigned(p.data_seed));
    r.bind("consistent", contains(keys, "consistent"), why, set_bool(p.consistent));
    r.bind("d_in", contains(keys, "d_in"), why, set_unsigned(p.d_in));
    r.bind("d_hidden", contains(keys, "d_hidden"), why, set_unsigned(p.d_hidden));
    r.bind("d_out", contains(keys, "d_out"), why, set_unsigned(p.d_out));
    r.bind("samples", contains(keys, "samples"), why, set_unsigned(p.samples));
    r.bind("components", contains(keys, "components"), why, set_unsigned(p.components));
    r.read(section("problem"));
  }
  {
    KernelSpec& k = cfg.kernel;
    const std::string_view kind = lookup(section("kernel"), "kind");
    if (!kind.empty()) set_enum(k.kind, kernel_kind_from_string)(kind);
    const bool poly = k.kind != KernelKind::euclidean;
    SectionReader r("kernel", errors);
    r.bind("kind", true, "", set_enum(k.kind, kernel_kind_from_string));
    r.bind("sigma", poly, "euclidean kernel has no parameters", set_double(k.sigma));
    r.bind("degree", poly, "euclidean kernel has no parameters",
           [&k](std::string_view s) { return parse_unsigned(s, k.degree); });
    r.read(section("kernel"));
  }
  {
    const std::string_view method = lookup(section("optimizer"), "method");
    if (!method.empty()) set_enum(cfg.optimizer.method, method_from_string)(method);

    OptimizerConfig& o = cfg.optimizer;
    const bool mom = uses_momentum(o.method);
    const std::string why = "method " + std::string(to_string(o.method)) + " has no momentum";
    SectionReader r("optimizer", errors);
    r.bind("method", true, "", set_enum(o.method, method_from_string));
    r.bind("eta0", true, "", set_double(o.eta0));
    r.bind("eta_schedule", true, "", set_enum(o.eta_schedule, schedule_kind_from_string));
    r.bind("theta0", mom, why, set_double(o.theta0));
    r.bind("theta_schedule", mom, why, set_enum(o.theta_schedule, schedule_kind_from_string));
    r.bind("tau", mom, why, set_double(o.tau));
    r.bind("nu0", true, "", set_double(o.nu0));
    r.bind("budget_epochs", true, "", set_unsigned(o.budget_epochs));
    r.bind("stationarity_target", true, "", set_double(o.stationarity_target));
    r.bind("proxy_window", true, "", set_unsigned(o.proxy_window));
    r.read(section("optimizer"));
  }
  if (sections.contains("composite")) {
    CompositeConfig& c = cfg.composite;
    const std::string_view reg = lookup(section("composite"), "regularizer");
    const std::string_view con = lookup(section("composite"), "constraint");
    if (!reg.empty()) set_enum(c.regularizer, regularizer_kind_from_string)(reg);
    if (!con.empty()) set_enum(c.constraint, constraint_kind_from_string)(con);
    const bool lasso = cfg.problem.name == "lasso_lad";
    const std::string lasso_why = "lasso_lad fixes its own regularizer and constraint";
    SectionReader r("composite", errors);
    r.bind("regularizer", !lasso, lasso_why, set_enum(c.regularizer, regularizer_kind_from_string));
    r.bind("lambda", !lasso && c.regularizer == RegularizerKind::l1,
           lasso ? lasso_why : "regularizer is zero", set_double(c.lambda));
    r.bind("constraint", !lasso, lasso_why, set_enum(c.constraint, constraint_kind_from_string));
    r.bind("lower", !lasso && c.constraint == ConstraintKind::box, lasso ? lasso_why : "constraint is not a box",
           set_double(c.lower));
    r.bind("upper", !lasso && c.constraint == ConstraintKind::box, lasso ? lasso_why : "constraint is not a box",
           set_double(c.upper));
    r.read(section("composite"));
  }
  {
    SamplerConfig& s = cfg.sampler;
    const std::string_view mode = lookup(section("sampler"), "mode");
    if (!mode.empty()) set_enum(s.mode, sampling_mode_from_string)(mode);
    SectionReader r("sampler", errors);
    r.bind("mode", true, "", set_enum(s.mode, sampling_mode_from_string));
    r.bind("seed", true, "", set_unsigned(s.seed));
    r.bind("batch", s.mode == SamplingMode::iid, "batches apply to the iid sampler only", set_unsigned(s.batch));
    r.read(section("sampler"));
  }
  {
    OutputConfig& o = cfg.output;
    SectionReader r("output", errors);
    r.bind("dir", true, "", [&o](std::string_view s) {
      o.dir = std::string(s);
      return !s.empty();
    });
    r.bind("trace_stride", true, "", set_unsigned(o.trace_stride));
    r.read(section("output"));
  }

  for (auto& e : validation_errors(cfg)) errors.push_back(std::move(e));
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot open config file '" + path.string() + "'"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::vector<std::string> validation_errors(const ExperimentConfig& c) {
  std::vector<std::string> e;
  const ProblemConfig& p = c.problem;
  const auto keys = problem_keys(p.name);
  if (contains(keys, "n") && p.n == 0) e.push_back("[problem] n must be >= 1");
  if (contains(keys, "m") && p.m < p.n) e.push_back("[problem] m must be >= n");
  if (contains(keys, "lambda") && !(p.lambda >= 0.0)) e.push_back("[problem] lambda must be >= 0");
  if (contains(keys, "d_in") && (p.d_in == 0 || p.d_hidden == 0 || p.d_out == 0)) {
    e.push_back("[problem] d_in, d_hidden and d_out must be >= 1");
  }
  if (contains(keys, "samples") && p.samples == 0) e.push_back("[problem] samples must be >= 1");
  if (contains(keys, "components") && p.components == 0) e.push_back("[problem] components must be >= 1");

  if (c.kernel.kind != KernelKind::euclidean) {
    if (!(c.kernel.sigma >= 0.0) || !std::isfinite(c.kernel.sigma)) e.push_back("[kernel] sigma must be >= 0");
    if (c.kernel.degree < 4) e.push_back("[kernel] degree must be an integer >= 4");
  }

  const OptimizerConfig& o = c.optimizer;
  if (!(o.eta0 > 0.0)) e.push_back("[optimizer] eta0 must be > 0");
  if (uses_momentum(o.method)) {
    if (!(o.theta0 > 0.0 && o.theta0 <= 1.0)) e.push_back("[optimizer] theta0 must be in (0, 1]");
    if (!(o.tau >= 0.0)) e.push_back("[optimizer] tau must be >= 0");
  }
  if (!(o.nu0 > 0.0)) e.push_back("[optimizer] nu0 must be > 0");
  if (!(o.stationarity_target >= 0.0)) e.push_back("[optimizer] stationarity_target must be >= 0");
  if (o.proxy_window == 0) e.push_back("[optimizer] proxy_window must be >= 1");

  const CompositeConfig& k = c.composite;
  if (k.regularizer == RegularizerKind::l1 && !(k.lambda >= 0.0)) e.push_back("[composite] lambda must be >= 0");
  if (k.constraint == ConstraintKind::box && !(k.lower <= k.upper)) {
    e.push_back("[composite] lower must be <= upper");
  }

  if (c.sampler.batch == 0) e.push_back("[sampler] batch must be >= 1");
  if (c.output.trace_stride == 0) e.push_back("[output] trace_stride must be >= 1");

  // Compatibility matrix.
  const bool sbpg = o.method == Method::sbpg;
  if (sbpg && c.kernel.kind == KernelKind::block_poly) {
    e.push_back("compatibility: method sbpg requires a coordinate-separable kernel (euclidean or coord_poly), "
                "not block_poly");
  }
  if (p.name == "lasso_lad" && !sbpg) {
    e.push_back("compatibility: problem lasso_lad is composite and requires method sbpg");
  }
  if (p.name != "lasso_lad" && is_composite(k) && !sbpg) {
    e.push_back("compatibility: a regularizer or constraint requires method sbpg");
  }
  return e;
}

void validate(const ExperimentConfig& config) {
  auto errors = validation_errors(config);
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

std::string config_echo(const ExperimentConfig& c) {
  std::ostringstream out;
  const auto kv = [&out](std::string_view key, const auto& value) { out << key << " = " << value << '\n'; };
  const auto dbl = [](double v) { return format_double(v); };

  out << "[problem]\n";
  kv("name", c.problem.name);
  const auto keys = problem_keys(c.problem.name);
  const ProblemConfig& p = c.problem;
  if (contains(keys, "m")) kv("m", p.m);
  if (contains(keys, "n")) kv("n", p.n);
  if (contains(keys, "lambda")) kv("lambda", dbl(p.lambda));
  if (contains(keys, "d_in")) {
    kv("d_in", p.d_in);
    kv("d_hidden", p.d_hidden);
    kv("d_out", p.d_out);
    kv("samples", p.samples);
  }
  if (contains(keys, "components")) kv("components", p.components);
  if (contains(keys, "data_seed")) kv("data_seed", p.data_seed);
  if (contains(keys, "consistent")) kv("consistent", p.consistent ? "true" : "false");

  out << "\n[kernel]\n";
  kv("kind", to_string(c.kernel.kind));
  if (c.kernel.kind != KernelKind::euclidean) {
    kv("sigma", dbl(c.kernel.sigma));
    kv("degree", c.kernel.degree);
  }

  const OptimizerConfig& o = c.optimizer;
  out << "\n[optimizer]\n";
  kv("method", to_string(o.method));
  kv("eta0", dbl(o.eta0));
  kv("eta_schedule", to_string(o.eta_schedule));
  if (uses_momentum(o.method)) {
    kv("theta0", dbl(o.theta0));
    kv("theta_schedule", to_string(o.theta_schedule));
    kv("tau", dbl(o.tau));
  }
  kv("nu0", dbl(o.nu0));
  kv("budget_epochs", o.budget_epochs);
  kv("stationarity_target", dbl(o.stationarity_target));
  kv("proxy_window", o.proxy_window);

  if (p.name != "lasso_lad" && is_composite(c.composite)) {
    const CompositeConfig& k = c.composite;
    out << "\n[composite]\n";
    kv("regularizer", to_string(k.regularizer));
    if (k.regularizer == RegularizerKind::l1) kv("lambda", dbl(k.lambda));
    kv("constraint", to_string(k.constraint));
    if (k.constraint == ConstraintKind::box) {
      kv("lower", dbl(k.lower));
      kv("upper", dbl(k.upper));
    }
  }

  out << "\n[sampler]\n";
  kv("mode", to_string(c.sampler.mode));
  kv("seed", c.sampler.seed);
  if (c.sampler.mode == SamplingMode::iid) kv("batch", c.sampler.batch);

  out << "\n[output]\n";
  kv("dir", c.output.dir);
  kv("trace_stride", c.output.trace_stride);
  return out.str();
}

RunSettings to_run_settings(const ExperimentConfig& c) {
  RunSettings s;
  const OptimizerConfig& o = c.optimizer;
  s.method = o.method;
  s.eta_schedule = Schedule{o.eta_schedule, o.eta0};
  s.theta_schedule = Schedule{o.theta_schedule, o.theta0};
  s.tau = o.tau;
  s.nu = ToleranceSchedule{o.nu0};
  s.budget_epochs = o.budget_epochs;
  s.trace_stride = c.output.trace_stride;
  s.proxy_window = o.proxy_window;
  s.stationarity_target = o.stationarity_target;
  if (c.problem.name == "lasso_lad") {
    s.regularizer = Regularizer::l1(c.problem.lambda);
    s.constraint = ConstraintSet::nonneg();
  } else {
    const CompositeConfig& k = c.composite;
    if (k.regularizer == RegularizerKind::l1) s.regularizer = Regularizer::l1(k.lambda);
    if (k.constraint == ConstraintKind::box) s.constraint = ConstraintSet::box(k.lower, k.upper);
    if (k.constraint == ConstraintKind::nonneg) s.constraint = ConstraintSet::nonneg();
  }
  return s;
}

}  // namespace bregsub
