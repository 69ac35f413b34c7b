// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ppml/error.hpp"
#include "ppml/protocols.hpp"

namespace ppml {

namespace {

constexpr int kParams = 3;

double max_rel_error(const CalibrationFit& f, const std::vector<Observation>& obs) {
  double worst = 0;
  for (const auto& o : obs) {
    const double pred = f.predict(o.net);
    const double denom = std::max(std::abs(o.latency_s), 1e-300);
    worst = std::max(worst, std::abs(pred - o.latency_s) / denom);
  }
  return worst;
}

}  // namespace

CalibrationFit fit_profile(const std::vector<Observation>& obs) {
  if (obs.size() < kParams) throw ConfigError("fit_profile needs at least 3 observations");
  const Eigen::Index n = static_cast<Eigen::Index>(obs.size());
  Eigen::MatrixXd a(n, kParams);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Observation& o = obs[static_cast<size_t>(i)];
    if (!(o.latency_s >= 0) || !std::isfinite(o.latency_s))
      throw ConfigError("observed latency must be finite and >= 0");
    // Relative weighting: every observation counts by its relative error.
    const double w = o.latency_s > 0 ? 1.0 / o.latency_s : 1.0;
    a(i, 0) = w;
    a(i, 1) = w * o.net.rtt_s;
    a(i, 2) = w / o.net.bandwidth_Bps;
    y(i) = w * o.latency_s;
  }
  // Column equilibration keeps the 1/bandwidth column well conditioned.
  Eigen::Vector3d scale;
  for (int j = 0; j < kParams; ++j) {
    const double m = a.col(j).cwiseAbs().maxCoeff();
    scale(j) = m > 0 ? m : 1.0;
    a.col(j) /= scale(j);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> full(a);
  full.setThreshold(1e-10);
  if (full.rank() < kParams)
    throw ConfigError("fit_profile: observations do not distinguish compute, RTT and bandwidth");

  // Non-negative least squares by enumerating the free-variable sets; with
  // three parameters this is exact and cheap.
  double best_cost = std::numeric_limits<double>::infinity();
  Eigen::Vector3d best = Eigen::Vector3d::Zero();
  for (int mask = 1; mask < (1 << kParams); ++mask) {
    std::vector<int> cols;
    for (int j = 0; j < kParams; ++j)
      if (mask & (1 << j)) cols.push_back(j);
    Eigen::MatrixXd sub(n, static_cast<Eigen::Index>(cols.size()));
    for (size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = a.col(cols[c]);
    const Eigen::VectorXd x = sub.colPivHouseholderQr().solve(y);
    if ((x.array() < 0).any()) continue;
    const double cost = (sub * x - y).squaredNorm();
    if (cost < best_cost) {
      best_cost = cost;
      best.setZero();
      for (size_t c = 0; c < cols.size(); ++c) best(cols[c]) = x(static_cast<Eigen::Index>(c));
    }
  }
  if (!std::isfinite(best_cost)) best.setZero();

  CalibrationFit f;
  f.compute_s = best(0) / scale(0);
  f.rounds = best(1) / scale(1);
  f.online_bytes = best(2) / scale(2);
  f.residual = max_rel_error(f, obs);
  return f;
}

}  // namespace ppml
