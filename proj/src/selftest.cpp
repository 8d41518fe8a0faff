// Copyright 2026 The bregsub Authors
// SPDX-License-Identifier: Apache-2.0

#include "bregsub/selftest.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <sstream>

#include "bregsub/config.hpp"
#include "bregsub/kernel.hpp"
#include "bregsub/optim.hpp"
#include "bregsub/oracle.hpp"
#include "bregsub/problems.hpp"
#include "bregsub/prox.hpp"
#include "bregsub/rng.hpp"
#include "bregsub/simd.hpp"
#include "bregsub/trace.hpp"

namespace bregsub {
namespace {

BlockedVector random_vector(const LayoutPtr& layout, Rng& rng, double scale) {
  BlockedVector v(layout);
  for (double& x : v.flat()) x = scale * rng.normal();
  return v;
}

std::vector<std::unique_ptr<Kernel>> sample_kernels(const LayoutPtr& layout) {
  std::vector<std::unique_ptr<Kernel>> out;
  out.push_back(make_kernel({KernelKind::euclidean}, layout));
  out.push_back(make_kernel({KernelKind::block_poly, 0.01, 4}, layout));
  out.push_back(make_kernel({KernelKind::block_poly, 1e-4, 6}, layout));
  out.push_back(make_kernel({KernelKind::coord_poly, 0.01, 4}, layout));
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

SelftestCheck check(std::string name, const std::function<std::string()>& body) {
  SelftestCheck c{std::move(name), false, {}};
  try {
    c.detail = body();
    c.passed = c.detail.empty();
  } catch (const std::exception& e) {
    c.detail = std::string("exception: ") + e.what();
  }
  return c;
}

}  // namespace

std::vector<SelftestCheck> run_selftest(std::uint64_t seed) {
  std::vector<SelftestCheck> out;
  const LayoutPtr layout = make_layout({3, 5, 1});

  out.push_back(check("kernel round-trip", [&]() -> std::string {
    Rng rng(seed);
    double worst = 0.0;
    for (const auto& k : sample_kernels(layout)) {
      for (int i = 0; i < 100; ++i) {
        const BlockedVector x = random_vector(layout, rng, 3.0);
        const double err = norm(k->grad_conj(k->grad(x)) - x) / (1.0 + norm(x));
        worst = std::max(worst, err);
      }
    }
    return worst <= 1e-9 ? "" : "relative error " + fmt(worst);
  }));

  out.push_back(check("inverse hessian", [&]() -> std::string {
    Rng rng(seed + 1);
    double worst = 0.0;
    for (const auto& k : sample_kernels(layout)) {
      for (int i = 0; i < 100; ++i) {
        const BlockedVector x = random_vector(layout, rng, 3.0);
        const BlockedVector v = random_vector(layout, rng, 1.0);
        const BlockedVector back = k->hessian_apply(x, k->inv_hessian_apply(x, v));
        worst = std::max(worst, norm(back - v) / (1.0 + norm(v)));
      }
    }
    return worst <= 1e-10 ? "" : "relative error " + fmt(worst);
  }));

  out.push_back(check("bregman nonnegativity", [&]() -> std::string {
    Rng rng(seed + 2);
    for (const auto& k : sample_kernels(layout)) {
      for (int i = 0; i < 100; ++i) {
        const BlockedVector x = random_vector(layout, rng, 2.0);
        const BlockedVector y = random_vector(layout, rng, 2.0);
        const double d = k->bregman(x, y);
        if (d < -1e-12 * (1.0 + std::fabs(k->value(x)) + std::fabs(k->value(y)))) {
          return k->name() + ": D = " + fmt(d);
        }
      }
    }
    return "";
  }));

  out.push_back(check("euclidean reduction", [&]() -> std::string {
    Rng rng(seed + 3);
    const EuclideanKernel k(layout);
    for (int i = 0; i < 50; ++i) {
      BlockedVector x = random_vector(layout, rng, 1.0);
      const BlockedVector g = random_vector(layout, rng, 1.0);
      BlockedVector expect = x;
      for (std::size_t j = 0; j < expect.flat().size(); ++j) expect.flat()[j] = x.flat()[j] - 0.1 * g.flat()[j];
      sbg_update(k, x, g, 0.1, 1e-6);
      if (!(x == expect)) return "sbg step differs from x - eta g";
    }
    return "";
  }));

  out.push_back(check("reshuffle zero-sum", [&]() -> std::string {
    const Problem p = make_l1_regression(10, 2, seed);
    const BlockedVector x = BlockedVector(p.objective.layout(), {0.3, -0.7});
    Sampler sampler(SamplingMode::reshuffle, p.objective.size(), seed);
    BlockedVector sum = x.zeros_like();
    for (std::size_t i = 0; i < sampler.steps_per_epoch(); ++i) axpy(1.0, p.objective.noise(sampler.next_index(), x), sum);
    return norm(sum) <= 1e-12 ? "" : "epoch noise sum " + fmt(norm(sum));
  }));

  out.push_back(check("simd agreement", [&]() -> std::string {
    const simd::Backend& ref = simd::scalar_backend();
    const simd::Backend& act = simd::active();
    Rng rng(seed + 4);
    std::vector<double> a(37), b(37), r1(37), r2(37);
    for (double& v : a) v = rng.normal();
    for (double& v : b) v = rng.normal();
    ref.sub_scaled(r1.data(), a.data(), 0.3, b.data(), a.size());
    act.sub_scaled(r2.data(), a.data(), 0.3, b.data(), a.size());
    if (r1 != r2) return std::string(act.name) + ": sub_scaled differs from scalar";
    ref.soft_clamp(r1.data(), a.data(), 0.4, -1.0, 1.0, a.size());
    act.soft_clamp(r2.data(), a.data(), 0.4, -1.0, 1.0, a.size());
    if (r1 != r2) return std::string(act.name) + ": soft_clamp differs from scalar";
    const double d1 = ref.dot(a.data(), b.data(), a.size());
    const double d2 = act.dot(a.data(), b.data(), a.size());
    return std::fabs(d1 - d2) <= 1e-12 * (1.0 + std::fabs(d1)) ? "" : std::string(act.name) + ": dot differs";
  }));

  out.push_back(check("trace round-trip", []() -> std::string {
    TraceRecord r{12, 3, 0.1, 0.05, 0.6666666666666666, 1e-300, 3.5, 0.0, 2.25e-7, 12345};
    return parse_record(format_record(r)) == r ? "" : "parsed record differs";
  }));

  out.push_back(check("config round-trip", []() -> std::string {
    const ExperimentConfig c = parse_config_text(
        "[problem]\nname = lasso_lad\n[kernel]\nkind = coord_poly\nsigma = 0.001\n"
        "[optimizer]\nmethod = sbpg\neta0 = 0.03\n[sampler]\nmode = full\n");
    return parse_config_text(config_echo(c)) == c ? "" : "echo does not reproduce the config";
  }));

  out.push_back(check("soft-threshold step", []() -> std::string {
    const EuclideanKernel k;
    const BlockedVector x = BlockedVector::from({2.0, -0.3});
    const ProxResult r = forward_backward(k, Regularizer::l1(0.5), ConstraintSet::whole_space(), x, x.zeros_like(),
                                          1.0, 1e-12);
    return r.point == BlockedVector::from({1.5, 0.0}) ? "" : "unexpected prox point";
  }));

  return out;
}

}  // namespace bregsub
