// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#include "bregsub/optim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bregsub/error.hpp"

namespace bregsub {
namespace {

// ||lead + (grad_plus - grad_x) / eta|| and ||grad_plus - grad_x|| / eta.
struct DualResidual {
  double residual;
  double step_norm;
};

DualResidual dual_residual(const BlockedVector& lead, const BlockedVector& grad_plus, const BlockedVector& grad_x,
                           double eta) {
  BlockedVector step = grad_plus - grad_x;
  scale_in_place(step, 1.0 / eta);
  const double step_norm = norm(step);
  axpy(1.0, lead, step);
  return {norm(step), step_norm};
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

void check_certificate(const char* method, double residual, double nu) {
  if (residual <= nu) return;
  std::ostringstream msg;
  msg.precision(6);
  msg << method << ": nu-certificate failed (residual " << residual << " > nu " << nu << ")";
  throw CertificateError(msg.str());
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::sbg:
      return "sbg";
    case Method::sbg_precond:
      return "sbg_precond";
    case Method::msbg:
      return "msbg";
    case Method::imsbg:
      return "imsbg";
    case Method::sbpg:
      return "sbpg";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  for (Method m : {Method::sbg, Method::sbg_precond, Method::msbg, Method::imsbg, Method::sbpg}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

bool uses_momentum(Method method) { return method == Method::msbg || method == Method::imsbg; }

OptimizerState OptimizerState::start(BlockedVector x0) {
  OptimizerState s;
  s.m = x0.zeros_like();
  s.g = x0.zeros_like();
  s.x = std::move(x0);
  return s;
}

// ---- Updates ----------------------------------------------------------------

StepReport sbg_update(const Kernel& kernel, BlockedVector& x, const BlockedVector& g, double eta, double nu) {
  require_positive(eta, "sbg: eta");
  require_same_layout(x, g, "sbg_update");
  const BlockedVector grad_x = kernel.grad(x);
  BlockedVector y = x.zeros_like();
  sub_scaled(y, grad_x, eta, g);
  kernel.grad_conj(y, x);

  const DualResidual d = dual_residual(g, kernel.grad(x), grad_x, eta);
  check_certificate("sbg", d.residual, nu);
  return {eta, 0.0, nu, d.step_norm, d.residual};
}

StepReport sbg_precond_update(const Kernel& kernel, BlockedVector& x, const BlockedVector& g, double eta) {
  require_positive(eta, "sbg_precond: eta");
  require_same_layout(x, g, "sbg_precond_update");
  const BlockedVector grad_x = kernel.grad(x);
  const BlockedVector p = kernel.inv_hessian_apply(x, g);
  sub_scaled(x, x, eta, p);

  const DualResidual d = dual_residual(g, kernel.grad(x), grad_x, eta);
  return {eta, 0.0, kNoCertificate, d.step_norm, d.residual};
}

StepReport msbg_update(const Kernel& kernel, BlockedVector& x, BlockedVector& m, const BlockedVector& g, double eta,
                       double theta, double nu) {
  require_positive(eta, "msbg: eta");
  require_positive(theta, "msbg: theta");
  require_same_layout(x, g, "msbg_update");
  require_same_layout(x, m, "msbg_update");
  const BlockedVector grad_x = kernel.grad(x);
  const BlockedVector w = kernel.inv_hessian_apply(x, m - g);

  BlockedVector y = x.zeros_like();
  sub_scaled(y, grad_x, eta, m);
  kernel.grad_conj(y, x);
  const DualResidual d = dual_residual(m, kernel.grad(x), grad_x, eta);

  sub_scaled(m, m, theta, w);
  check_certificate("msbg", d.residual, nu);
  return {eta, theta, nu, d.step_norm, d.residual};
}

StepReport imsbg_update(const Kernel& kernel, BlockedVector& x, BlockedVector& m, const BlockedVector& g, double eta,
                        double theta) {
  require_positive(eta, "imsbg: eta");
  require_positive(theta, "imsbg: theta");
  require_same_layout(x, g, "imsbg_update");
  require_same_layout(x, m, "imsbg_update");
  const BlockedVector grad_x = kernel.grad(x);
  const BlockedVector w = kernel.inv_hessian_apply(x, m - g);
  const BlockedVector px = kernel.inv_hessian_apply(x, m);

  sub_scaled(x, x, eta, px);
  const DualResidual d = dual_residual(m, kernel.grad(x), grad_x, eta);

  sub_scaled(m, m, theta, w);
  return {eta, theta, kNoCertificate, d.step_norm, d.residual};
}

StepReport sbpg_update(const Kernel& kernel, const Regularizer& r, const ConstraintSet& x_set, BlockedVector& x,
                       const BlockedVector& g, double eta, double nu) {
  require_positive(eta, "sbpg: eta");
  const BlockedVector grad_x = kernel.grad(x);
  ProxResult res = forward_backward(kernel, r, x_set, x, g, eta, nu);
  const double step_norm = norm(kernel.grad(res.point) - grad_x) / eta;
  x = std::move(res.point);
  return {eta, 0.0, nu, step_norm, res.certificate.stationarity_residual};
}

// ---- Sampling ---------------------------------------------------------------

void sample_element(const FiniteSumObjective& objective, Sampler& sampler, const BlockedVector& x,
                    BlockedVector& out) {
  switch (sampler.mode()) {
    case SamplingMode::full:
      objective.eval_full(x, out);
      return;
    case SamplingMode::reshuffle:
      objective.eval_component(sampler.next_index(), x, out);
      return;
    case SamplingMode::iid: {
      if (sampler.batch_size() == 1) {
        objective.eval_component(sampler.next_index(), x, out);
        return;
      }
      BlockedVector scratch = x.zeros_like();
      out.set_zero();
      for (std::size_t b = 0; b < sampler.batch_size(); ++b) {
        objective.eval_component(sampler.next_index(), x, scratch);
        axpy(1.0, scratch, out);
      }
      scale_in_place(out, 1.0 / static_cast<double>(sampler.batch_size()));
      return;
    }
  }
}

namespace {

void advance(OptimizerState& state, const Sampler& sampler) {
  ++state.k;
  state.epoch = state.k / sampler.steps_per_epoch();
}

}  // namespace

StepReport sbg_step(OptimizerState& state, const Kernel& kernel, const FiniteSumObjective& objective,
                    Sampler& sampler, double eta, double nu) {
  sample_element(objective, sampler, state.x, state.g);
  const StepReport rep = sbg_update(kernel, state.x, state.g, eta, nu);
  advance(state, sampler);
  return rep;
}

StepReport sbg_precond_step(OptimizerState& state, const Kernel& kernel, const FiniteSumObjective& objective,
                            Sampler& sampler, double eta) {
  sample_element(objective, sampler, state.x, state.g);
  const StepReport rep = sbg_precond_update(kernel, state.x, state.g, eta);
  advance(state, sampler);
  return rep;
}

StepReport msbg_step(OptimizerState& state, const Kernel& kernel, const FiniteSumObjective& objective,
                     Sampler& sampler, double eta, double theta, double nu) {
  sample_element(objective, sampler, state.x, state.g);
  const StepReport rep = msbg_update(kernel, state.x, state.m, state.g, eta, theta, nu);
  advance(state, sampler);
  return rep;
}

StepReport imsbg_step(OptimizerState& state, const Kernel& kernel, const FiniteSumObjective& objective,
                      Sampler& sampler, double eta, double theta) {
  sample_element(objective, sampler, state.x, state.g);
  const StepReport rep = imsbg_update(kernel, state.x, state.m, state.g, eta, theta);
  advance(state, sampler);
  return rep;
}

StepReport sbpg_step(OptimizerState& state, const Kernel& kernel, const FiniteSumObjective& objective,
                     Sampler& sampler, const Regularizer& r, const ConstraintSet& x_set, double eta, double nu) {
  sample_element(objective, sampler, state.x, state.g);
  const StepReport rep = sbpg_update(kernel, r, x_set, state.x, state.g, eta, nu);
  advance(state, sampler);
  return rep;
}

// ---- Runs -------------------------------------------------------------------

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::completed:
      return "completed";
    case RunStatus::target_reached:
      return "target_reached";
    case RunStatus::certificate_failure:
      return "certificate_failure";
    case RunStatus::solver_failure:
      return "solver_failure";
  }
  return "unknown";
}

double RunSettings::resolved_tau() const {
  if (tau > 0.0) return tau;
  return theta_schedule.base / eta_schedule.base;
}

void validate_run(const Kernel& kernel, const RunSettings& s) {
  if (!(s.eta_schedule.base > 0.0)) throw std::invalid_argument("eta0 must be positive");
  if (uses_momentum(s.method) && !(s.theta_schedule.base > 0.0)) {
    throw std::invalid_argument("theta0 must be positive for momentum methods");
  }
  if (s.method == Method::sbpg) {
    require_supported(kernel, s.regularizer, s.constraint);
  } else if (!s.regularizer.is_zero() || s.constraint.kind != ConstraintKind::whole_space) {
    throw UnsupportedError("method '" + std::string(to_string(s.method)) +
                           "' is unconstrained and unregularized; use sbpg for composite problems");
  }
}

RunResult run(const FiniteSumObjective& objective, const Kernel& kernel, Sampler& sampler, BlockedVector x0,
              const RunSettings& s, TraceSink* sink) {
  validate_run(kernel, s);
  const auto t0 = std::chrono::steady_clock::now();
  const auto elapsed_ns = [&] {
    return static_cast<std::int64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count());
  };

  RunResult res;
  const bool momentum = uses_momentum(s.method);
  const double tau = s.resolved_tau();
  const std::size_t spe = sampler.steps_per_epoch();
  const std::size_t total = s.budget_epochs * spe;
  const std::size_t stride = std::max<std::size_t>(s.trace_stride, 1);

  if (s.method == Method::sbpg && !s.constraint.contains(x0)) {
    s.constraint.project(x0);
    res.warnings.push_back("initial point projected onto the constraint set");
  }
  if (momentum && s.budget_epochs > 0) {
    const std::size_t last = s.budget_epochs - 1;
    const double ratio =
        s.theta_schedule.at(total - 1, last) / s.eta_schedule.at(total - 1, last);
    if (std::fabs(ratio - tau) > 0.01 * tau) {
      std::ostringstream w;
      w.precision(6);
      w << "theta/eta at the end of the budget is " << ratio << ", more than 1% away from tau = " << tau;
      res.warnings.push_back(w.str());
    }
  }

  OptimizerState& st = res.state;
  st = OptimizerState::start(std::move(x0));
  if (s.record_duals) {
    res.duals.emplace(s.dual_stride);
    res.duals->record(0, st.x, kernel.grad(st.x));
  }

  const auto composite_value = [&](const BlockedVector& x) { return objective.value(x) + s.regularizer.value(x); };
  const auto emit = [&](const TraceRecord& rec) {
    res.trace.push_back(rec);
    if (sink) sink->write(rec);
  };

  {
    TraceRecord rec;
    rec.eta = total > 0 ? s.eta_schedule.at(0, 0) : s.eta_schedule.eval(0);
    rec.theta = momentum ? s.theta_schedule.at(0, 0) : 0.0;
    BlockedVector full = st.x.zeros_like();
    rec.f_value = objective.eval_full(st.x, full) + s.regularizer.value(st.x);
    rec.stationarity_proxy = norm(full);
    rec.wall_ns = elapsed_ns();
    res.best_value = rec.f_value;
    emit(rec);
  }

  ElementWindow window(s.proxy_window);
  for (std::size_t k = 0; k < total; ++k) {
    const std::size_t epoch = k / spe;
    const double eta = s.eta_schedule.at(k, epoch);
    const double theta = momentum ? s.theta_schedule.at(k, epoch) : 0.0;
    const double nu = s.nu.eval(k);

    StepReport rep;
    try {
      switch (s.method) {
        case Method::sbg:
          rep = sbg_step(st, kernel, objective, sampler, eta, nu);
          break;
        case Method::sbg_precond:
          rep = sbg_precond_step(st, kernel, objective, sampler, eta);
          break;
        case Method::msbg:
          rep = msbg_step(st, kernel, objective, sampler, eta, theta, nu);
          break;
        case Method::imsbg:
          rep = imsbg_step(st, kernel, objective, sampler, eta, theta);
          break;
        case Method::sbpg:
          rep = sbpg_step(st, kernel, objective, sampler, s.regularizer, s.constraint, eta, nu);
          break;
      }
    } catch (const CertificateError& e) {
      res.status = RunStatus::certificate_failure;
      res.message = "iteration " + std::to_string(k + 1) + ": " + e.what();
      break;
    } catch (const ConvergenceError& e) {
      res.status = RunStatus::solver_failure;
      res.message = "iteration " + std::to_string(k + 1) + ": " + e.what();
      break;
    }

    res.iterations = st.k;
    res.etas.push_back(eta);
    res.max_cert_residual = std::max(res.max_cert_residual, rep.cert_residual);
    window.push(st.g);
    if (res.duals) {
      res.duals->push_step(eta);
      if (st.k % res.duals->stride() == 0 || st.k == total) res.duals->record(st.k, st.x, kernel.grad(st.x));
    }

    const bool last = st.k == total;
    const bool target_hit = s.stationarity_target > 0.0 && window.full() && window.proxy() < s.stationarity_target;
    if (st.k % stride == 0 || last || target_hit) {
      TraceRecord rec;
      rec.iter = st.k;
      rec.epoch = epoch;
      rec.eta = eta;
      rec.theta = theta;
      rec.f_value = composite_value(st.x);
      rec.m_norm = momentum ? norm(st.m) : 0.0;
      rec.dual_step_norm = rep.dual_step_norm;
      rec.cert_residual = rep.cert_residual;
      rec.stationarity_proxy = window.proxy();
      rec.wall_ns = elapsed_ns();
      res.best_value = std::min(res.best_value, rec.f_value);
      emit(rec);
    }
    if (target_hit) {
      res.status = RunStatus::target_reached;
      break;
    }
  }

  if (sink) sink->flush();
  return res;
}

}  // namespace bregsub
