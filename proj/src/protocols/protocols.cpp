// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppml/protocols.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "ppml/error.hpp"

namespace ppml {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::kA2b:
      return "a2b";
    case Scheme::kFss:
      return "fss";
    case Scheme::kFhe:
      return "fhe";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
  if (n == "a2b" || n == "mpc_a2b") return Scheme::kA2b;
  if (n == "fss" || n == "mpc_fss") return Scheme::kFss;
  if (n == "fhe") return Scheme::kFhe;
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

namespace {

void check_ring(int k) {
  if (k != 32 && k != 64) throw ConfigError("ring width must be 32 or 64 bits");
}

void check_elems(double elems) {
  if (!(elems >= 0) || !std::isfinite(elems)) throw ConfigError("element count must be >= 0");
}

double ceil_log2(double n) { return n <= 1 ? 0.0 : std::ceil(std::log2(n)); }

// Sequential composition of gate costs.
GateCost operator+(GateCost a, const GateCost& b) {
  a.rounds += b.rounds;
  a.online_bytes += b.online_bytes;
  a.offline_bytes += b.offline_bytes;
  return a;
}

// Structural cost of one layer for one sample. Rounds are per batch.
struct Recipe {
  double rounds = 0;
  double online_bytes = 0;
  double offline_bytes = 0;
  double nl_bytes = 0;  // online bytes of non-linear protocol work
};

// Arithmetic-sharing recipes. Non-linear functions are built from the
// comparison ladder and Beaver products; exp, reciprocal and inverse
// square root are iterative approximations of fixed depth.
Recipe a2b_recipe(const LayerSpec& l, int k, const A2bConstants& c) {
  const double w = k / 8.0;
  const double in = static_cast<double>(input_elems(l));
  const double out = static_cast<double>(output_elems(l));
  const double rows = static_cast<double>(layer_rows(l));
  const double len = static_cast<double>(layer_row_len(l));
  const int e = c.exp_iters, r = c.recip_iters, s = c.rsqrt_iters;
  Recipe rc;
  auto set = [&](const GateCost& g) {
    rc.rounds = g.rounds;
    rc.online_bytes = g.online_bytes;
    rc.offline_bytes = g.offline_bytes;
    rc.nl_bytes = g.online_bytes;
  };
  // One product round over `mults` elements, `depth` rounds deep.
  auto products = [&](double depth, double mults) {
    GateCost g = beaver_mul_cost(mults, k);
    g.rounds = depth;
    return g;
  };
  switch (l.kind) {
    case LayerKind::kMatmul:
    case LayerKind::kConv2d: {
      const double rhs = static_cast<double>(rhs_elems(l));
      // Open the masked activation (and activation operand), one round.
      rc.rounds = 1;
      rc.online_bytes = (in + rhs) * w;
      rc.offline_bytes = (in + rhs + out) * w;
      break;
    }
    case LayerKind::kRelu:
      set(a2b_nonlinear_cost(in, k, c) + beaver_mul_cost(in, k));
      break;
    case LayerKind::kMaxpool: {
      const double win = static_cast<double>(l.window * l.window);
      const GateCost step = a2b_nonlinear_cost(out * (win - 1), k, c) +
                            beaver_mul_cost(out * (win - 1), k);
      GateCost g = step;
      g.rounds = ceil_log2(win) * (step.rounds);
      set(g);
      break;
    }
    case LayerKind::kMaxReduce: {
      // Tournament over each row: ceil(log2 L) levels, L-1 comparisons.
      const double n = rows * (len - 1);
      const GateCost step = a2b_nonlinear_cost(n, k, c) + beaver_mul_cost(n, k);
      GateCost g = step;
      g.rounds = ceil_log2(len) * step.rounds;
      set(g);
      break;
    }
    case LayerKind::kSoftmax: {
      // exp on every element, reciprocal of the row sums, final scaling.
      const double mults = in * (e + 1) + rows * (e + 2 * r);
      set(products(e + (e + 2 * r) + 1, mults));
      break;
    }
    case LayerKind::kGelu: {
      const double depth = 2 * e + 2 * r + 1;
      set(products(depth, in * depth));
      break;
    }
    case LayerKind::kLayernorm: {
      const double mults = 2 * in + rows * (e + 3 * s);
      set(products(2 + e + 3 * s, mults));
      break;
    }
    case LayerKind::kAvgpool:  // local sum and local truncation
    case LayerKind::kEmbedding:
      break;
  }
  return rc;
}

// FSS recipes. Every gate reveals its masked input once; keys are
// consumed per inference.
Recipe fss_recipe(const LayerSpec& l, int k, const FssConstants& c) {
  const double w = k / 8.0;
  const double lam = c.lambda;
  const double dcf2 = k * (lam + 2.0 * k) / 8.0 * c.kappa;  // comparison with 2-word payload
  const double dcf1 = k * (lam + 1.0 * k) / 8.0 * c.kappa;  // truncation
  const double lut = fss_lut_key_bytes(c.lut_bits, k, c.lambda);
  const double in = static_cast<double>(input_elems(l));
  const double out = static_cast<double>(output_elems(l));
  const double rows = static_cast<double>(layer_rows(l));
  const double len = static_cast<double>(layer_row_len(l));
  Recipe rc;
  switch (l.kind) {
    case LayerKind::kMatmul:
    case LayerKind::kConv2d: {
      const double rhs = static_cast<double>(rhs_elems(l));
      const double masks = rhs > 0 ? 3.0 : 1.0;  // Beaver-style masks for act x act
      rc.rounds = 2;  // masked reveal, then truncation
      rc.online_bytes = (in + rhs + out) * w;
      rc.offline_bytes = out * dcf1 + (in + rhs + out) * w * masks;
      break;
    }
    case LayerKind::kRelu: {
      const FssGateCost g = fss_nonlinear_cost(in, k, c.lambda, c.kappa);
      rc.rounds = g.rounds;
      rc.online_bytes = g.online_bytes;
      rc.offline_bytes = g.key_bytes + in * 3 * w;  // plus mask shares r, s, r*s
      rc.nl_bytes = rc.online_bytes;
      break;
    }
    case LayerKind::kMaxpool: {
      const double win = static_cast<double>(l.window * l.window);
      const FssGateCost g = fss_nonlinear_cost(out * (win - 1), k, c.lambda, c.kappa);
      rc.rounds = ceil_log2(win);
      rc.online_bytes = g.online_bytes;
      rc.offline_bytes = g.key_bytes;
      rc.nl_bytes = rc.online_bytes;
      break;
    }
    case LayerKind::kMaxReduce: {
      const FssGateCost g = fss_nonlinear_cost(rows * (len - 1), k, c.lambda, c.kappa);
      rc.rounds = ceil_log2(len);
      rc.online_bytes = g.online_bytes;
      rc.offline_bytes = g.key_bytes;
      rc.nl_bytes = rc.online_bytes;
      break;
    }
    case LayerKind::kAvgpool:
      rc.rounds = 1;
      rc.online_bytes = out * w;
      rc.offline_bytes = out * dcf1;
      break;
    case LayerKind::kSoftmax:
      rc.rounds = 4;
      rc.online_bytes = (4 * in + rows) * w;
      rc.offline_bytes = in * (lut + 3 * w + dcf1) + rows * lut;
      rc.nl_bytes = rc.online_bytes;
      break;
    case LayerKind::kGelu:
      rc.rounds = 3;
      rc.online_bytes = 3 * in * w;
      rc.offline_bytes = in * (dcf2 + lut + dcf1);
      rc.nl_bytes = rc.online_bytes;
      break;
    case LayerKind::kLayernorm:
      rc.rounds = 4;
      rc.online_bytes = (4 * in + rows) * w;
      rc.offline_bytes = in * (4 * w + dcf1) + rows * lut;
      rc.nl_bytes = rc.online_bytes;
      break;
    case LayerKind::kEmbedding:
      break;
  }
  return rc;
}

const ModelScales& scales_for(const MpcCalibration& cal, const ModelGraph& g) {
  static const ModelScales kUnit;
  if (auto it = cal.models.find(g.name); it != cal.models.end()) return it->second;
  const std::string fallback = "default_" + std::string(to_string(g.family));
  if (auto it = cal.models.find(fallback); it != cal.models.end()) return it->second;
  return kUnit;
}

void check_latency(double v, const char* what) {
  if (!(v >= 0) || !std::isfinite(v))
    throw ConfigError(std::string("missing or invalid FHE latency entry '") + what + "'");
}

}  // namespace

GateCost a2b_nonlinear_cost(double elems, int ring_bits, const A2bConstants& c) {
  check_ring(ring_bits);
  check_elems(elems);
  GateCost g;
  g.rounds = c.r0 + c.r1 * ceil_log2(ring_bits);
  g.online_bytes = c.c * ring_bits * elems / 8.0;
  g.offline_bytes = c.c_offline * ring_bits * elems / 8.0;
  return g;
}

GateCost beaver_mul_cost(double elems, int ring_bits) {
  check_ring(ring_bits);
  check_elems(elems);
  return {1.0, 2.0 * ring_bits / 8.0 * elems, 3.0 * ring_bits / 8.0 * elems};
}

FssGateCost fss_nonlinear_cost(double elems, int ring_bits, int lambda, double kappa) {
  check_ring(ring_bits);
  check_elems(elems);
  if (lambda <= 0 || !(kappa > 0)) throw ConfigError("lambda and kappa must be positive");
  FssGateCost g;
  g.rounds = 1;
  g.online_bytes = ring_bits * elems / 8.0;
  g.key_bytes = elems * ring_bits * (lambda + 2.0 * ring_bits) / 8.0 * kappa;
  return g;
}

double fss_lut_key_bytes(int domain_bits, int ring_bits, int lambda) {
  check_ring(ring_bits);
  if (domain_bits < 1 || lambda <= 0) throw ConfigError("invalid lookup-table parameters");
  return lambda / 8.0 * (domain_bits + 1) + ring_bits / 8.0;
}

Calibration default_calibration() {
  Calibration cal;
  for (ModelFamily f : {ModelFamily::kCnn, ModelFamily::kTransformer}) {
    MpcBackend a;
    a.name = "a2b-default";
    a.ring_bits = 64;
    cal.a2b.backends[f] = a;
    MpcBackend s;
    s.name = "fss-default";
    s.ring_bits = f == ModelFamily::kCnn ? 32 : 64;
    cal.fss.backends[f] = s;
    FheBackend h;
    h.name = "fhe-default";
    h.nonlinear = {{LayerKind::kRelu, {20, 2}},      {LayerKind::kGelu, {12, 1}},
                   {LayerKind::kSoftmax, {18, 3}},   {LayerKind::kLayernorm, {10, 1}},
                   {LayerKind::kMaxReduce, {20, 2}}, {LayerKind::kMaxpool, {20, 2}}};
    cal.fhe[f] = h;
  }
  return cal;
}

LayerCost& LayerCost::operator+=(const LayerCost& o) {
  online_rounds += o.online_rounds;
  online_bytes += o.online_bytes;
  offline_bytes += o.offline_bytes;
  online_compute_s += o.online_compute_s;
  offline_compute_s += o.offline_compute_s;
  key_bytes += o.key_bytes;
  gpu_mem_bytes += o.gpu_mem_bytes;
  cpu_mem_bytes += o.cpu_mem_bytes;
  return *this;
}

void retotal(CostProfile& p) {
  LayerCost t;
  t.layer = "total";
  for (const auto& l : p.per_layer) t += l;
  p.totals = t;
}

CostProfile mpc_profile(const ModelGraph& g, Scheme scheme, const Calibration& cal) {
  if (scheme == Scheme::kFhe) throw ConfigError("mpc_profile called for fhe");
  validate_graph(g);
  const MpcCalibration& mc = scheme == Scheme::kA2b ? cal.a2b : cal.fss;
  auto bit = mc.backends.find(g.family);
  if (bit == mc.backends.end())
    throw ConfigError("no " + std::string(to_string(scheme)) + " backend for family " +
                      std::string(to_string(g.family)));
  const MpcBackend& be = bit->second;
  const ModelScales& sc = scales_for(mc, g);
  const double b = static_cast<double>(g.batch);

  CostProfile p;
  p.scheme = scheme;
  p.model = g.name;
  p.batch = g.batch;

  double dense_weights = 0;
  for (const auto& l : g.layers)
    if (l.kind == LayerKind::kMatmul) dense_weights += static_cast<double>(weight_elems(l));
  if (!g.layers.empty()) {
    LayerCost setup;
    setup.layer = "batch_setup";
    setup.online_compute_s = be.batch_fixed_s + be.s_per_dense_weight * dense_weights;
    p.per_layer.push_back(setup);
  }

  double peak_gpu = 0;
  for (const auto& l : g.layers) {
    const Recipe r = scheme == Scheme::kA2b ? a2b_recipe(l, be.ring_bits, cal.a2b_gates)
                                            : fss_recipe(l, be.ring_bits, cal.fss_gates);
    LayerCost c;
    c.layer = l.name;
    c.online_rounds = r.rounds * sc.rounds;
    c.online_bytes = r.online_bytes * sc.online_bytes * b;
    c.offline_bytes = r.offline_bytes * sc.offline_bytes * b;
    c.key_bytes = scheme == Scheme::kFss ? c.offline_bytes : 0.0;
    const double work = be.s_per_mac * static_cast<double>(layer_macs(l)) +
                        be.s_per_nl_byte * r.nl_bytes;
    c.online_compute_s = sc.compute * work * b;
    c.offline_compute_s = sc.offline_compute * be.s_per_offline_byte * r.offline_bytes * b;
    const double act = static_cast<double>(input_elems(l) + output_elems(l) + rhs_elems(l));
    c.gpu_mem_bytes = be.gpu_bytes_per_elem * act * b +
                      8.0 * static_cast<double>(weight_elems(l));
    c.cpu_mem_bytes = c.offline_bytes;
    peak_gpu = std::max(peak_gpu, c.gpu_mem_bytes);
    p.per_layer.push_back(std::move(c));
  }
  retotal(p);
  p.peak_gpu_mem_bytes = be.gpu_base_bytes + peak_gpu;
  p.peak_cpu_mem_bytes = be.cpu_base_bytes + p.totals.cpu_mem_bytes;
  return p;
}

FheOpCounts fhe_layer_ops(const LayerSpec& l, const FheBackend& b) {
  const double slots = b.slots;
  auto cts = [&](double elems) { return std::ceil(elems / slots); };
  const double in = static_cast<double>(input_elems(l));
  const double out = static_cast<double>(output_elems(l));
  const double macs = static_cast<double>(layer_macs(l));
  FheOpCounts c;
  auto nonlinear = [&](LayerKind kind, double n_ct, double levels) {
    auto it = b.nonlinear.find(kind);
    if (it == b.nonlinear.end())
      throw ConfigError("FHE backend has no entry for layer kind '" +
                        std::string(to_string(kind)) + "'");
    c.ct_mults += n_ct * levels * it->second.ct_mults;
    c.bootstraps += n_ct * levels * it->second.bootstraps;
  };
  switch (l.kind) {
    case LayerKind::kMatmul:
      if (rhs_elems(l) > 0) {
        c.ct_mults = macs / slots;
        c.rotations = c.ct_mults * b.rot_per_ct_matmul;
      } else {
        c.pt_mults = macs / slots;
        c.rotations = c.pt_mults * b.rot_per_pt_dense;
      }
      c.bootstraps = cts(out) * b.boots_per_linear_ct;
      break;
    case LayerKind::kConv2d:
      c.pt_mults = macs / slots;
      c.rotations = c.pt_mults * b.rot_per_pt_conv;
      c.bootstraps = cts(out) * b.boots_per_linear_ct;
      break;
    case LayerKind::kAvgpool:
      c.rotations = cts(in) * ceil_log2(static_cast<double>(l.window * l.window));
      break;
    case LayerKind::kRelu:
    case LayerKind::kGelu:
    case LayerKind::kSoftmax:
    case LayerKind::kLayernorm:
      nonlinear(l.kind, cts(in), 1);
      break;
    case LayerKind::kMaxReduce:
      nonlinear(l.kind, cts(in), ceil_log2(static_cast<double>(layer_row_len(l))));
      break;
    case LayerKind::kMaxpool:
      nonlinear(l.kind, cts(in), ceil_log2(static_cast<double>(l.window * l.window)));
      break;
    case LayerKind::kEmbedding:
      break;
  }
  return c;
}

CostProfile fhe_profile(const ModelGraph& g, const FheBackend& be) {
  check_latency(be.pt_mult, "pt_mult");
  check_latency(be.ct_mult, "ct_mult");
  check_latency(be.rotation, "rotation");
  check_latency(be.bootstrap, "bootstrap");
  if (be.slots <= 0 || be.log_n <= 0 || be.limbs <= 0 || be.io_limbs <= 0)
    throw ConfigError("FHE ring parameters must be positive");
  validate_graph(g);
  const double b = static_cast<double>(g.batch);
  const double n = std::ldexp(1.0, be.log_n);
  const double ct_bytes = 2.0 * n * be.limbs * 8.0;
  const double io_ct_bytes = 2.0 * n * be.io_limbs * 8.0;
  auto cts = [&](std::int64_t elems) {
    return std::ceil(static_cast<double>(elems) / be.slots);
  };

  CostProfile p;
  p.scheme = Scheme::kFhe;
  p.model = g.name;
  p.batch = g.batch;

  // The client uploads the encrypted input of the first protocol layer and
  // downloads the encrypted result of the last one.
  std::int64_t in_elems = 0, out_elems = 0;
  for (const auto& l : g.layers) {
    if (l.kind == LayerKind::kEmbedding) continue;
    if (in_elems == 0) in_elems = input_elems(l);
    out_elems = output_elems(l);
  }

  LayerCost up;
  up.layer = "input_upload";
  up.online_rounds = 1;
  up.online_bytes = cts(in_elems) * io_ct_bytes * b;
  up.key_bytes = be.eval_key_bytes;
  p.per_layer.push_back(up);

  double peak_gpu = 0;
  for (const auto& l : g.layers) {
    const FheOpCounts ops = fhe_layer_ops(l, be);
    LayerCost c;
    c.layer = l.name;
    c.online_compute_s = b * (ops.pt_mults * be.pt_mult + ops.ct_mults * be.ct_mult +
                              ops.rotations * be.rotation + ops.bootstraps * be.bootstrap);
    if (l.kind != LayerKind::kEmbedding)
      c.gpu_mem_bytes = (cts(input_elems(l) + rhs_elems(l)) + cts(output_elems(l))) * ct_bytes * b;
    peak_gpu = std::max(peak_gpu, c.gpu_mem_bytes);
    p.per_layer.push_back(std::move(c));
  }

  LayerCost down;
  down.layer = "result_download";
  down.online_rounds = 1;
  down.online_bytes = cts(out_elems) * io_ct_bytes * b;
  p.per_layer.push_back(down);

  retotal(p);
  p.peak_gpu_mem_bytes = be.gpu_base_bytes + be.eval_key_bytes + peak_gpu;
  return p;
}

CostProfile make_profile(const ModelGraph& g, Scheme scheme, const Calibration& cal) {
  if (scheme != Scheme::kFhe) return mpc_profile(g, scheme, cal);
  auto it = cal.fhe.find(g.family);
  if (it == cal.fhe.end())
    throw ConfigError("no fhe backend for family " + std::string(to_string(g.family)));
  return fhe_profile(g, it->second);
}

CostProfile builtin_profile(std::string_view model, Scheme scheme, std::int64_t batch,
                            const Calibration& cal, std::int64_t seq_len,
                            std::optional<bool> include_max) {
  BuiltinOptions opts;
  opts.include_max = include_max.value_or(scheme != Scheme::kFhe);
  return make_profile(build_builtin_model(model, seq_len, batch, opts), scheme, cal);
}

double online_latency(const CostProfile& p, const NetworkConfig& cfg) {
  return p.online_compute_s() + comm_time(p.totals.online_rounds, p.totals.online_bytes, cfg);
}

double offline_latency(const CostProfile& p, const NetworkConfig& cfg) {
  return p.offline_compute_s() + comm_time(0, p.totals.offline_bytes, cfg);
}

}  // namespace ppml
