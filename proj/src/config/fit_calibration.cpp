// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ppml/config.hpp"
#include "ppml/error.hpp"

namespace ppml {

namespace {

// Minimum bootstrap-to-rotation latency ratio accepted by the FHE fit.
constexpr double kMinBootstrapRatio = 10.0;

struct Structural {
  double rounds = 0;
  double online_bytes = 0;
  double offline_bytes = 0;
  double work = 0;          // online compute at unit scale, excluding batch setup
  double offline_work = 0;  // offline compute at unit scale
  double dense_weights = 0;
};

Structural structural(const std::string& model, Scheme scheme, const Calibration& base) {
  Calibration cal = base;
  MpcCalibration& mc = scheme == Scheme::kA2b ? cal.a2b : cal.fss;
  mc.models.clear();
  for (auto& [f, be] : mc.backends) {
    be.batch_fixed_s = 0;
    be.s_per_dense_weight = 1;
  }
  const CostProfile p = builtin_profile(model, scheme, 1, cal);
  Structural s;
  s.rounds = p.totals.online_rounds;
  s.online_bytes = p.totals.online_bytes;
  s.offline_bytes = p.totals.offline_bytes;
  for (const auto& l : p.per_layer) {
    if (l.layer == "batch_setup")
      s.dense_weights += l.online_compute_s;
    else
      s.work += l.online_compute_s;
  }
  s.offline_work = p.totals.offline_compute_s;
  return s;
}

std::vector<Observation> observations(const Anchors& a, const std::vector<double>& latency) {
  std::vector<Observation> obs;
  for (size_t i = 0; i < a.networks.size(); ++i) obs.push_back({a.networks[i], latency[i]});
  return obs;
}

double ratio_or_one(double num, double den) { return den > 0 ? num / den : 1.0; }

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct MpcRow {
  std::string model;
  ModelFamily family;
  Structural st;
  CalibrationFit online, combined;
  double fixed = 0;  // per-batch fixed compute implied by the throughput row
};

void fit_mpc(Scheme scheme, const Anchors& a, Calibration& cal, std::vector<std::string>* log) {
  MpcCalibration& mc = scheme == Scheme::kA2b ? cal.a2b : cal.fss;
  const double nb = static_cast<double>(a.throughput_batch);
  std::vector<MpcRow> rows;
  for (const auto& [model, ma] : a.models) {
    auto it = ma.mpc.find(scheme);
    if (it == ma.mpc.end() || it->second.online.empty()) continue;
    const AnchorSeries& s = it->second;
    MpcRow r;
    r.model = model;
    r.family = build_builtin_model(model, 128, 1).family;
    r.st = structural(model, scheme, cal);
    if (!(r.st.work > 0))
      throw ConfigError("calibration base gives zero online work for " + model +
                        "; set s_per_mac and s_per_nl_byte priors");
    r.online = fit_profile(observations(a, s.online));
    r.combined = s.online_offline.empty() ? r.online : fit_profile(observations(a, s.online_offline));
    if (!s.throughput_online.empty() && nb > 1) {
      std::vector<double> per_batch;
      for (double t : s.throughput_online) per_batch.push_back(nb / t);
      const CalibrationFit big = fit_profile(observations(a, per_batch));
      const double per_sample = (big.compute_s - r.online.compute_s) / (nb - 1);
      r.fixed = std::max(r.online.compute_s - per_sample, 0.0);
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) return;

  // Per-batch fixed compute. A2B scales with the dense weight count across
  // all models; FSS is a per-family constant.
  if (scheme == Scheme::kA2b) {
    double num = 0, den = 0;
    for (const auto& r : rows) {
      num += r.fixed * r.st.dense_weights;
      den += r.st.dense_weights * r.st.dense_weights;
    }
    const double k = den > 0 ? num / den : 0.0;
    for (auto& [f, be] : mc.backends) {
      be.batch_fixed_s = 0;
      be.s_per_dense_weight = k;
    }
  } else {
    for (auto& [f, be] : mc.backends) {
      double sum = 0;
      int n = 0;
      for (const auto& r : rows)
        if (r.family == f) sum += r.fixed, ++n;
      be.batch_fixed_s = n > 0 ? sum / n : 0.0;
      be.s_per_dense_weight = 0;
    }
  }

  std::map<ModelFamily, std::vector<ModelScales>> by_family;
  for (const auto& r : rows) {
    const MpcBackend& be = mc.backends.at(r.family);
    const double fixed = be.batch_fixed_s + be.s_per_dense_weight * r.st.dense_weights;
    ModelScales sc;
    sc.rounds = ratio_or_one(r.online.rounds, r.st.rounds);
    sc.online_bytes = ratio_or_one(r.online.online_bytes, r.st.online_bytes);
    sc.offline_bytes = ratio_or_one(
        std::max(r.combined.online_bytes - r.online.online_bytes, 0.0), r.st.offline_bytes);
    sc.compute = std::max(r.online.compute_s - fixed, 0.0) / r.st.work;
    sc.offline_compute = ratio_or_one(
        std::max(r.combined.compute_s - r.online.compute_s, 0.0), r.st.offline_work);
    mc.models[r.model] = sc;
    by_family[r.family].push_back(sc);
    if (log)
      log->push_back(std::string(to_string(scheme)) + " " + r.model +
                     fmt(": compute %.4g s, rounds %.4g, bytes %.4g, residual %.3g", r.online.compute_s,
                         r.online.rounds, r.online.online_bytes, r.online.residual));
  }

  // Family means serve models without their own anchors.
  for (const auto& [f, list] : by_family) {
    auto gm = [&](double ModelScales::*field) {
      double s = 0;
      for (const auto& sc : list) s += sc.*field;
      return s / static_cast<double>(list.size());
    };
    ModelScales d;
    d.rounds = gm(&ModelScales::rounds);
    d.online_bytes = gm(&ModelScales::online_bytes);
    d.offline_bytes = gm(&ModelScales::offline_bytes);
    d.compute = gm(&ModelScales::compute);
    d.offline_compute = gm(&ModelScales::offline_compute);
    mc.models["default_" + std::string(to_string(f))] = d;
  }
}

void fit_fhe(const Anchors& a, Calibration& cal, std::vector<std::string>* log) {
  struct Row {
    double unit = 0;  // coefficient of the unit op latency
    double boots = 0;
    double target = 0;
    double weight = 1;
  };
  std::map<ModelFamily, std::vector<Row>> rows;
  for (const auto& [model, ma] : a.models) {
    if (!(ma.fhe_latency_s > 0)) continue;
    const ModelGraph g = build_builtin_model(model, 128, 1, {.include_max = false});
    auto it = cal.fhe.find(g.family);
    if (it == cal.fhe.end()) throw ConfigError("no fhe backend for family " + std::string(to_string(g.family)));
    FheBackend zero = it->second;
    zero.pt_mult = zero.ct_mult = zero.rotation = zero.bootstrap = 0;
    const CostProfile boundary = fhe_profile(g, zero);
    double comm = 0;
    for (const auto& net : a.networks) comm += online_latency(boundary, net);
    comm /= static_cast<double>(std::max<size_t>(a.networks.size(), 1));
    Row r;
    for (const auto& l : g.layers) {
      const FheOpCounts ops = fhe_layer_ops(l, it->second);
      r.unit += ops.pt_mults / 4 + ops.ct_mults + ops.rotations;
      r.boots += ops.bootstraps;
    }
    r.target = ma.fhe_latency_s - comm;
    r.weight = ma.fhe_weight;
    if (!(r.target > 0)) throw ConfigError("FHE anchor for " + model + " is below the transfer time");
    rows[g.family].push_back(r);
  }
  for (auto& [f, list] : rows) {
    // Weighted relative least squares in (u, b).
    double s11 = 0, s12 = 0, s22 = 0, t1 = 0, t2 = 0;
    for (const auto& r : list) {
      const double x1 = r.unit / r.target, x2 = r.boots / r.target;
      s11 += r.weight * x1 * x1;
      s12 += r.weight * x1 * x2;
      s22 += r.weight * x2 * x2;
      t1 += r.weight * x1;
      t2 += r.weight * x2;
    }
    const double det = s11 * s22 - s12 * s12;
    double u = -1, b = -1;
    if (list.size() >= 2 && std::abs(det) > 1e-12 * s11 * s22) {
      u = (t1 * s22 - t2 * s12) / det;
      b = (s11 * t2 - s12 * t1) / det;
    }
    if (!(u > 0) || !(b >= kMinBootstrapRatio * u)) {
      double num = 0, den = 0;
      for (const auto& r : list) {
        const double x = (r.unit + kMinBootstrapRatio * r.boots) / r.target;
        num += r.weight * x;
        den += r.weight * x * x;
      }
      u = num / den;
      b = kMinBootstrapRatio * u;
    }
    FheBackend& be = cal.fhe.at(f);
    be.pt_mult = u / 4;
    be.ct_mult = u;
    be.rotation = u;
    be.bootstrap = b;
    if (log)
      log->push_back("fhe " + std::string(to_string(f)) +
                     fmt(": unit op %.4g s, bootstrap %.4g s", u, b));
  }
}

}  // namespace

CalibrationBundle fit_calibration(const Anchors& anchors, const CalibrationBundle& base,
                                  std::vector<std::string>* log) {
  if (anchors.networks.size() < 3) throw ConfigError("anchors need at least 3 networks");
  CalibrationBundle out = base;
  out.cal.source_hash.clear();
  fit_mpc(Scheme::kA2b, anchors, out.cal, log);
  fit_mpc(Scheme::kFss, anchors, out.cal, log);
  fit_fhe(anchors, out.cal, log);
  return out;
}

}  // namespace ppml
