// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0
//
// What-if studies: longer contexts and compute getting faster relative to
// the network.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ppml/netmodel.hpp"
#include "ppml/protocols.hpp"

namespace ppml {

// Divides every compute term by x; rounds and bytes are untouched.
// Throws ConfigError for x < 1.
CostProfile scale_hardware(const CostProfile& p, double x);

// Latency of one profile: online only, or online plus offline. Divided by
// the batch when `per_sample` is set.
struct LatencyView {
  bool include_offline = false;
  bool per_sample = false;
};
double view_latency(const CostProfile& p, const NetworkConfig& cfg, const LatencyView& v);

struct ContextOptions {
  std::string model = "bert_base";
  std::int64_t batch = 1;
  std::optional<bool> include_max;  // scheme default when unset
  LatencyView view;
  std::int64_t anchor = 128;
};

struct CurvePoint {
  double x = 0;
  double value = 0;       // latency, seconds
  double normalized = 0;  // value / value at the anchor
};

// Lengths must lie in [16, 512].
std::vector<CurvePoint> context_sweep(const std::vector<std::int64_t>& lengths, Scheme scheme,
                                      const NetworkConfig& cfg, const Calibration& cal,
                                      const ContextOptions& opts = {});

struct Contender {
  std::string label;
  CostProfile profile;
  LatencyView view;

  double latency(const NetworkConfig& cfg, double x) const;
};

struct Crossover {
  std::optional<double> x;  // none when the ordering does not flip in range
  double gap_at_lo = 0;     // latency(a) - latency(b)
  double gap_at_hi = 0;
};

// Bisection on latency(a) - latency(b) over [x_lo, x_hi] (log-spaced).
// Identical curves cross at x_lo. Throws ConfigError if either curve is
// not monotone in x.
Crossover crossover(const std::function<double(double)>& a,
                    const std::function<double(double)>& b, double x_lo, double x_hi);
Crossover crossover(const Contender& a, const Contender& b, const NetworkConfig& cfg,
                    double x_lo, double x_hi);

struct HwSweepRow {
  double x = 0;
  std::vector<double> latency;   // per contender
  std::vector<double> per_x;     // latency / min over contenders at this x
  std::vector<double> global;    // latency / latency of the same contender at x = 1
};
std::vector<HwSweepRow> hw_sweep(const std::vector<Contender>& contenders,
                                 const std::vector<double>& xs, const NetworkConfig& cfg);

}  // namespace ppml
