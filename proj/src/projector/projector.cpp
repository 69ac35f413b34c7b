// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppml/projector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ppml/error.hpp"

namespace ppml {

CostProfile scale_hardware(const CostProfile& p, double x) {
  if (!(x >= 1) || !std::isfinite(x)) throw ConfigError("hardware speedup must be >= 1");
  CostProfile out = p;
  out.compute_speedup *= x;
  return out;
}

double view_latency(const CostProfile& p, const NetworkConfig& cfg, const LatencyView& v) {
  double t = online_latency(p, cfg);
  if (v.include_offline) t += offline_latency(p, cfg);
  return v.per_sample ? t / static_cast<double>(p.batch) : t;
}

std::vector<CurvePoint> context_sweep(const std::vector<std::int64_t>& lengths, Scheme scheme,
                                      const NetworkConfig& cfg, const Calibration& cal,
                                      const ContextOptions& opts) {
  auto at = [&](std::int64_t n) {
    if (n < 16 || n > 512) throw ConfigError("context lengths must lie in [16, 512]");
    const CostProfile p =
        builtin_profile(opts.model, scheme, opts.batch, cal, n, opts.include_max);
    return view_latency(p, cfg, opts.view);
  };
  const double anchor = at(opts.anchor);
  std::vector<CurvePoint> out;
  for (std::int64_t n : lengths) {
    const double v = at(n);
    out.push_back({static_cast<double>(n), v, v / anchor});
  }
  return out;
}

double Contender::latency(const NetworkConfig& cfg, double x) const {
  return view_latency(scale_hardware(profile, x), cfg, view);
}

namespace {

void check_monotone(const std::function<double(double)>& f, double lo, double hi) {
  constexpr int kSamples = 64;
  int sign = 0;
  double prev = f(lo);
  for (int i = 1; i <= kSamples; ++i) {
    const double x = lo * std::pow(hi / lo, static_cast<double>(i) / kSamples);
    const double v = f(x);
    const double tol = 1e-12 * std::max(std::abs(v), std::abs(prev));
    const int s = v > prev + tol ? 1 : (v < prev - tol ? -1 : 0);
    if (s != 0) {
      if (sign != 0 && s != sign) throw ConfigError("crossover needs monotone latency curves");
      sign = s;
    }
    prev = v;
  }
}

}  // namespace

Crossover crossover(const std::function<double(double)>& a,
                    const std::function<double(double)>& b, double x_lo, double x_hi) {
  if (!(x_lo >= 1) || !(x_hi >= x_lo)) throw ConfigError("crossover range must satisfy 1 <= lo <= hi");
  check_monotone(a, x_lo, x_hi);
  check_monotone(b, x_lo, x_hi);
  auto gap = [&](double x) { return a(x) - b(x); };
  Crossover c;
  c.gap_at_lo = gap(x_lo);
  c.gap_at_hi = gap(x_hi);
  if (c.gap_at_lo == 0) {
    c.x = x_lo;
    return c;
  }
  if ((c.gap_at_lo > 0) == (c.gap_at_hi > 0) && c.gap_at_hi != 0) return c;
  // Bisection in log space.
  double lo = std::log(x_lo), hi = std::log(x_hi);
  const bool lo_positive = c.gap_at_lo > 0;
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double g = gap(std::exp(mid));
    if (g == 0) {
      lo = hi = mid;
      break;
    }
    ((g > 0) == lo_positive ? lo : hi) = mid;
  }
  c.x = std::exp(0.5 * (lo + hi));
  return c;
}

Crossover crossover(const Contender& a, const Contender& b, const NetworkConfig& cfg,
                    double x_lo, double x_hi) {
  return crossover([&](double x) { return a.latency(cfg, x); },
                   [&](double x) { return b.latency(cfg, x); }, x_lo, x_hi);
}

std::vector<HwSweepRow> hw_sweep(const std::vector<Contender>& contenders,
                                 const std::vector<double>& xs, const NetworkConfig& cfg) {
  std::vector<double> base;
  for (const auto& c : contenders) base.push_back(c.latency(cfg, 1.0));
  std::vector<HwSweepRow> rows;
  for (double x : xs) {
    HwSweepRow r;
    r.x = x;
    for (const auto& c : contenders) r.latency.push_back(c.latency(cfg, x));
    const double best = r.latency.empty() ? 1.0
                                          : *std::min_element(r.latency.begin(), r.latency.end());
    for (size_t i = 0; i < contenders.size(); ++i) {
      r.per_x.push_back(r.latency[i] / best);
      r.global.push_back(r.latency[i] / base[i]);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace ppml
