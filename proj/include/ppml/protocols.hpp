// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Per-scheme cost profiles. MPC layers are priced from gate recipes
// (comparison ladders, Beaver products, FSS gates) and then scaled by
// per-model calibration factors; FHE layers are priced from operation
// counts and a per-operation latency table.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ppml/netmodel.hpp"
#include "ppml/workload.hpp"

namespace ppml {

enum class Scheme { kA2b, kFss, kFhe };
std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view name);  // throws ConfigError

// ---------------------------------------------------------------------------
// Gate-level formulas

struct GateCost {
  double rounds = 0;
  double online_bytes = 0;   // per party
  double offline_bytes = 0;  // dealer material per party
};

struct A2bConstants {
  double r0 = 2;
  double r1 = 1;
  double c = 6;
  double c_offline = 10;
  int exp_iters = 8;
  int recip_iters = 10;
  int rsqrt_iters = 3;
};

struct FssConstants {
  int lambda = 128;
  double kappa = 1;
  int lut_bits = 13;
};

// rounds = r0 + r1*ceil(log2 k), bytes = c*k*elems/8. k in {32, 64}.
GateCost a2b_nonlinear_cost(double elems, int ring_bits, const A2bConstants& c = {});
// One Beaver product per element: 1 round, 2k/8 online, 3k/8 offline.
GateCost beaver_mul_cost(double elems, int ring_bits);

struct FssGateCost {
  double rounds = 0;
  double online_bytes = 0;
  double key_bytes = 0;
};
// rounds = 1, bytes = k*elems/8, key = elems*k*(lambda + 2k)/8*kappa.
FssGateCost fss_nonlinear_cost(double elems, int ring_bits, int lambda = 128,
                               double kappa = 1);

// Key of one lookup-table gate: a DPF over `domain_bits` plus one output
// mask word. Equals the serialized DPF key size.
double fss_lut_key_bytes(int domain_bits, int ring_bits, int lambda = 128);

// ---------------------------------------------------------------------------
// Calibration

// Compute model of one MPC framework for one model family.
struct MpcBackend {
  std::string name;
  int ring_bits = 64;
  double s_per_mac = 0;
  double s_per_nl_byte = 0;           // per structural online byte of non-linear layers
  double s_per_offline_byte = 0;      // dealer generation per structural offline byte
  double batch_fixed_s = 0;           // once per batch
  double s_per_dense_weight = 0;      // once per batch, per matmul weight
  double gpu_bytes_per_elem = 16;     // working set per activation element
  double gpu_base_bytes = 0;
  double cpu_base_bytes = 0;
};

// Per-model corrections on top of the structural recipe.
struct ModelScales {
  double rounds = 1;
  double online_bytes = 1;
  double offline_bytes = 1;
  double compute = 1;
  double offline_compute = 1;
};

struct MpcCalibration {
  std::map<ModelFamily, MpcBackend> backends;
  std::map<std::string, ModelScales> models;  // unknown models use scale 1
};

struct FheNonlinearCost {
  double ct_mults = 0;
  double bootstraps = 0;
};

struct FheBackend {
  std::string name;
  // Seconds per operation.
  double pt_mult = 0;
  double ct_mult = 0;
  double rotation = 0;
  double bootstrap = 0;
  int slots = 32768;
  int log_n = 16;
  int limbs = 24;
  int io_limbs = 2;
  double rot_per_pt_dense = 0.125;
  double rot_per_pt_conv = 1;
  double rot_per_ct_matmul = 1;
  double boots_per_linear_ct = 1;
  std::map<LayerKind, FheNonlinearCost> nonlinear;
  double eval_key_bytes = 0;
  double gpu_base_bytes = 0;
};

struct Calibration {
  std::string schema = "ppml-calibration/1";
  A2bConstants a2b_gates;
  FssConstants fss_gates;
  MpcCalibration a2b;
  MpcCalibration fss;
  std::map<ModelFamily, FheBackend> fhe;
  std::string source_hash;  // SHA-256 of the file it was loaded from
};

// Unit calibration: structural recipes with every scale and compute
// constant at its neutral value. Useful for tests and as the fitting base.
Calibration default_calibration();

// ---------------------------------------------------------------------------
// Profiles

struct LayerCost {
  std::string layer;
  double online_rounds = 0;
  double online_bytes = 0;
  double offline_bytes = 0;
  double online_compute_s = 0;
  double offline_compute_s = 0;
  double key_bytes = 0;
  double gpu_mem_bytes = 0;
  double cpu_mem_bytes = 0;

  LayerCost& operator+=(const LayerCost& o);
};

struct CostProfile {
  Scheme scheme = Scheme::kA2b;
  std::string model;
  std::int64_t batch = 1;
  std::vector<LayerCost> per_layer;
  LayerCost totals;
  // Compute fields are stored unscaled; readers divide by this factor.
  double compute_speedup = 1;
  double peak_gpu_mem_bytes = 0;
  double peak_cpu_mem_bytes = 0;

  double online_compute_s() const { return totals.online_compute_s / compute_speedup; }
  double offline_compute_s() const { return totals.offline_compute_s / compute_speedup; }
};

// Recomputes totals from per_layer.
void retotal(CostProfile& p);

// MPC profiles (a2b, fss) from the gate recipes and calibration.
CostProfile mpc_profile(const ModelGraph& g, Scheme scheme, const Calibration& cal);

struct FheOpCounts {
  double pt_mults = 0;
  double ct_mults = 0;
  double rotations = 0;
  double bootstraps = 0;
};
FheOpCounts fhe_layer_ops(const LayerSpec& l, const FheBackend& b);

// Throws ConfigError if a per-op latency is missing (negative/NaN).
CostProfile fhe_profile(const ModelGraph& g, const FheBackend& backend);

// Dispatches on scheme; FHE uses the backend of the graph's family.
CostProfile make_profile(const ModelGraph& g, Scheme scheme, const Calibration& cal);

// Builds the builtin graph appropriate for the scheme (FHE graphs omit the
// max before softmax) and profiles it.
CostProfile builtin_profile(std::string_view model, Scheme scheme, std::int64_t batch,
                            const Calibration& cal, std::int64_t seq_len = 128,
                            std::optional<bool> include_max = std::nullopt);

// Latency of the online phase and of online + offline for one profile.
double online_latency(const CostProfile& p, const NetworkConfig& cfg);
double offline_latency(const CostProfile& p, const NetworkConfig& cfg);

// ---------------------------------------------------------------------------
// Fitting latency = compute + rounds * rtt + bytes / bandwidth

struct Observation {
  NetworkConfig net;
  double latency_s = 0;
};

struct CalibrationFit {
  double compute_s = 0;
  double rounds = 0;
  double online_bytes = 0;
  double residual = 0;  // max relative error over the observations

  double predict(const NetworkConfig& cfg) const {
    return compute_s + comm_time(rounds, online_bytes, cfg);
  }
};

// Relative-error weighted least squares with non-negative parameters.
// Throws ConfigError for fewer than 3 observations or a singular system.
CalibrationFit fit_profile(const std::vector<Observation>& obs);

}  // namespace ppml
