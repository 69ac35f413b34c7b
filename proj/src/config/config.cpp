// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppml/config.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "ppml/error.hpp"

#ifndef PPML_DATA_DIR
#define PPML_DATA_DIR "data"
#endif

namespace ppml {

namespace {

// Strict accessor over a YAML tree that anchors errors at source lines.
class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    const YAML::Mark m = at.Mark();
    std::ostringstream os;
    os << origin_ << ':' << (m.line >= 0 ? m.line + 1 : 0) << ':' << (m.column >= 0 ? m.column + 1 : 0)
       << ": " << msg;
    throw ConfigError(os.str());
  }

  void map(const YAML::Node& n, std::string_view what) const {
    if (!n.IsMap()) fail(n, std::string(what) + " must be a mapping");
  }

  // Rejects keys outside `allowed`.
  void keys(const YAML::Node& n, std::string_view what,
            std::initializer_list<std::string_view> allowed) const {
    map(n, what);
    for (const auto& kv : n) {
      const std::string k = kv.first.as<std::string>();
      bool ok = false;
      for (auto a : allowed) ok = ok || a == k;
      if (!ok) fail(kv.first, "unknown key '" + k + "' in " + std::string(what));
    }
  }

  template <typename T>
  T get(const YAML::Node& n, const char* key, T fallback) const {
    const YAML::Node v = n[key];
    if (!v) return fallback;
    return as<T>(v, key);
  }

  template <typename T>
  T require(const YAML::Node& n, const char* key) const {
    const YAML::Node v = n[key];
    if (!v) fail(n, std::string("missing key '") + key + "'");
    return as<T>(v, key);
  }

  template <typename T>
  T as(const YAML::Node& v, const char* key) const {
    try {
      return v.as<T>();
    } catch (const YAML::Exception&) {
      fail(v, std::string("bad value for '") + key + "'");
    }
  }

  double number(const YAML::Node& n, const char* key, double fallback, double min) const {
    const double v = get<double>(n, key, fallback);
    if (!(v >= min) || !std::isfinite(v))
      fail(n[key] ? n[key] : n, std::string("'") + key + "' out of range");
    return v;
  }

  template <typename F>
  void wrap(const YAML::Node& at, F&& f) const {
    try {
      f();
    } catch (const ConfigError& e) {
      const std::string m = e.what();
      if (m.rfind(origin_ + ":", 0) == 0) throw;
      fail(at, m);
    }
  }

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
};

YAML::Node load_yaml(const std::string& text, const std::string& origin) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << origin << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
    throw ConfigError(os.str());
  }
}

ModelFamily parse_family(const Reader& r, const YAML::Node& key) {
  const std::string f = key.as<std::string>();
  if (f == "cnn") return ModelFamily::kCnn;
  if (f == "transformer") return ModelFamily::kTransformer;
  r.fail(key, "unknown model family '" + f + "'");
}

MpcBackend read_backend(const Reader& r, const YAML::Node& n) {
  r.keys(n, "backend",
         {"name", "ring_bits", "s_per_mac", "s_per_nl_byte", "s_per_offline_byte", "batch_fixed_s",
          "s_per_dense_weight", "gpu_bytes_per_elem", "gpu_base_bytes", "cpu_base_bytes"});
  MpcBackend b;
  b.name = r.get<std::string>(n, "name", "");
  b.ring_bits = r.get<int>(n, "ring_bits", 64);
  if (b.ring_bits != 32 && b.ring_bits != 64) r.fail(n["ring_bits"], "ring_bits must be 32 or 64");
  b.s_per_mac = r.number(n, "s_per_mac", 0, 0);
  b.s_per_nl_byte = r.number(n, "s_per_nl_byte", 0, 0);
  b.s_per_offline_byte = r.number(n, "s_per_offline_byte", 0, 0);
  b.batch_fixed_s = r.number(n, "batch_fixed_s", 0, 0);
  b.s_per_dense_weight = r.number(n, "s_per_dense_weight", 0, 0);
  b.gpu_bytes_per_elem = r.number(n, "gpu_bytes_per_elem", 16, 0);
  b.gpu_base_bytes = r.number(n, "gpu_base_bytes", 0, 0);
  b.cpu_base_bytes = r.number(n, "cpu_base_bytes", 0, 0);
  return b;
}

ModelScales read_scales(const Reader& r, const YAML::Node& n) {
  r.keys(n, "model scales", {"rounds", "online_bytes", "offline_bytes", "compute", "offline_compute"});
  ModelScales s;
  s.rounds = r.number(n, "rounds", 1, 0);
  s.online_bytes = r.number(n, "online_bytes", 1, 0);
  s.offline_bytes = r.number(n, "offline_bytes", 1, 0);
  s.compute = r.number(n, "compute", 1, 0);
  s.offline_compute = r.number(n, "offline_compute", 1, 0);
  return s;
}

MpcCalibration read_mpc(const Reader& r, const YAML::Node& n, std::string_view what) {
  r.keys(n, what, {"backends", "models"});
  MpcCalibration m;
  if (const YAML::Node b = n["backends"]) {
    r.map(b, "backends");
    for (const auto& kv : b) m.backends[parse_family(r, kv.first)] = read_backend(r, kv.second);
  }
  if (const YAML::Node ms = n["models"]) {
    r.map(ms, "models");
    for (const auto& kv : ms) m.models[kv.first.as<std::string>()] = read_scales(r, kv.second);
  }
  return m;
}

FheBackend read_fhe(const Reader& r, const YAML::Node& n) {
  r.keys(n, "fhe backend",
         {"name", "pt_mult", "ct_mult", "rotation", "bootstrap", "slots", "log_n", "limbs",
          "io_limbs", "rot_per_pt_dense", "rot_per_pt_conv", "rot_per_ct_matmul",
          "boots_per_linear_ct", "eval_key_bytes", "gpu_base_bytes", "nonlinear"});
  FheBackend b;
  b.name = r.get<std::string>(n, "name", "");
  b.pt_mult = r.number(n, "pt_mult", -1, 0);
  b.ct_mult = r.number(n, "ct_mult", -1, 0);
  b.rotation = r.number(n, "rotation", -1, 0);
  b.bootstrap = r.number(n, "bootstrap", -1, 0);
  b.slots = r.get<int>(n, "slots", b.slots);
  b.log_n = r.get<int>(n, "log_n", b.log_n);
  b.limbs = r.get<int>(n, "limbs", b.limbs);
  b.io_limbs = r.get<int>(n, "io_limbs", b.io_limbs);
  if (b.slots <= 0 || b.log_n <= 0 || b.log_n > 20 || b.limbs <= 0 || b.io_limbs <= 0)
    r.fail(n, "FHE ring parameters out of range");
  b.rot_per_pt_dense = r.number(n, "rot_per_pt_dense", b.rot_per_pt_dense, 0);
  b.rot_per_pt_conv = r.number(n, "rot_per_pt_conv", b.rot_per_pt_conv, 0);
  b.rot_per_ct_matmul = r.number(n, "rot_per_ct_matmul", b.rot_per_ct_matmul, 0);
  b.boots_per_linear_ct = r.number(n, "boots_per_linear_ct", b.boots_per_linear_ct, 0);
  b.eval_key_bytes = r.number(n, "eval_key_bytes", 0, 0);
  b.gpu_base_bytes = r.number(n, "gpu_base_bytes", 0, 0);
  if (const YAML::Node nl = n["nonlinear"]) {
    r.map(nl, "nonlinear");
    for (const auto& kv : nl) {
      LayerKind kind{};
      r.wrap(kv.first, [&] { kind = parse_layer_kind(kv.first.as<std::string>()); });
      r.keys(kv.second, "nonlinear entry", {"ct_mults", "bootstraps"});
      b.nonlinear[kind] = {r.number(kv.second, "ct_mults", 0, 0),
                           r.number(kv.second, "bootstraps", 0, 0)};
    }
  }
  return b;
}

void emit_backend(YAML::Emitter& e, const MpcBackend& b) {
  e << YAML::BeginMap << YAML::Key << "name" << YAML::Value << b.name << YAML::Key << "ring_bits"
    << YAML::Value << b.ring_bits << YAML::Key << "s_per_mac" << YAML::Value << b.s_per_mac
    << YAML::Key << "s_per_nl_byte" << YAML::Value << b.s_per_nl_byte << YAML::Key
    << "s_per_offline_byte" << YAML::Value << b.s_per_offline_byte << YAML::Key << "batch_fixed_s"
    << YAML::Value << b.batch_fixed_s << YAML::Key << "s_per_dense_weight" << YAML::Value
    << b.s_per_dense_weight << YAML::Key << "gpu_bytes_per_elem" << YAML::Value
    << b.gpu_bytes_per_elem << YAML::Key << "gpu_base_bytes" << YAML::Value << b.gpu_base_bytes
    << YAML::Key << "cpu_base_bytes" << YAML::Value << b.cpu_base_bytes << YAML::EndMap;
}

void emit_mpc(YAML::Emitter& e, const MpcCalibration& m) {
  e << YAML::BeginMap << YAML::Key << "backends" << YAML::Value << YAML::BeginMap;
  for (const auto& [f, b] : m.backends) {
    e << YAML::Key << std::string(to_string(f)) << YAML::Value;
    emit_backend(e, b);
  }
  e << YAML::EndMap << YAML::Key << "models" << YAML::Value << YAML::BeginMap;
  for (const auto& [name, s] : m.models) {
    e << YAML::Key << name << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "rounds"
      << YAML::Value << s.rounds << YAML::Key << "online_bytes" << YAML::Value << s.online_bytes
      << YAML::Key << "offline_bytes" << YAML::Value << s.offline_bytes << YAML::Key << "compute"
      << YAML::Value << s.compute << YAML::Key << "offline_compute" << YAML::Value
      << s.offline_compute << YAML::EndMap;
  }
  e << YAML::EndMap << YAML::EndMap;
}

void emit_fhe(YAML::Emitter& e, const FheBackend& b) {
  e << YAML::BeginMap;
  e << YAML::Key << "name" << YAML::Value << b.name;
  e << YAML::Key << "pt_mult" << YAML::Value << b.pt_mult;
  e << YAML::Key << "ct_mult" << YAML::Value << b.ct_mult;
  e << YAML::Key << "rotation" << YAML::Value << b.rotation;
  e << YAML::Key << "bootstrap" << YAML::Value << b.bootstrap;
  e << YAML::Key << "slots" << YAML::Value << b.slots;
  e << YAML::Key << "log_n" << YAML::Value << b.log_n;
  e << YAML::Key << "limbs" << YAML::Value << b.limbs;
  e << YAML::Key << "io_limbs" << YAML::Value << b.io_limbs;
  e << YAML::Key << "rot_per_pt_dense" << YAML::Value << b.rot_per_pt_dense;
  e << YAML::Key << "rot_per_pt_conv" << YAML::Value << b.rot_per_pt_conv;
  e << YAML::Key << "rot_per_ct_matmul" << YAML::Value << b.rot_per_ct_matmul;
  e << YAML::Key << "boots_per_linear_ct" << YAML::Value << b.boots_per_linear_ct;
  e << YAML::Key << "eval_key_bytes" << YAML::Value << b.eval_key_bytes;
  e << YAML::Key << "gpu_base_bytes" << YAML::Value << b.gpu_base_bytes;
  e << YAML::Key << "nonlinear" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, c] : b.nonlinear)
    e << YAML::Key << std::string(to_string(k)) << YAML::Value << YAML::Flow << YAML::BeginMap
      << YAML::Key << "ct_mults" << YAML::Value << c.ct_mults << YAML::Key << "bootstraps"
      << YAML::Value << c.bootstraps << YAML::EndMap;
  e << YAML::EndMap << YAML::EndMap;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ":0:0: cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string default_calibration_path() {
  if (const char* env = std::getenv("PPML_CALIBRATION"); env && *env) return env;
  return std::string(PPML_DATA_DIR) + "/calibration.yaml";
}

CalibrationBundle parse_calibration(const std::string& text, const std::string& origin) {
  const Reader r(origin);
  const YAML::Node root = load_yaml(text, origin);
  r.keys(root, "calibration",
         {"schema", "a2b_gates", "fss_gates", "a2b", "fss", "fhe", "energy_mapping"});
  const std::string schema = r.require<std::string>(root, "schema");
  if (schema != kCalibrationSchema)
    r.fail(root["schema"], "unsupported calibration schema '" + schema + "'");

  CalibrationBundle out;
  Calibration& cal = out.cal;
  cal.schema = schema;
  if (const YAML::Node g = root["a2b_gates"]) {
    r.keys(g, "a2b_gates",
           {"r0", "r1", "c", "c_offline", "exp_iters", "recip_iters", "rsqrt_iters"});
    A2bConstants& c = cal.a2b_gates;
    c.r0 = r.number(g, "r0", c.r0, 0);
    c.r1 = r.number(g, "r1", c.r1, 0);
    c.c = r.number(g, "c", c.c, 0);
    c.c_offline = r.number(g, "c_offline", c.c_offline, 0);
    c.exp_iters = r.get<int>(g, "exp_iters", c.exp_iters);
    c.recip_iters = r.get<int>(g, "recip_iters", c.recip_iters);
    c.rsqrt_iters = r.get<int>(g, "rsqrt_iters", c.rsqrt_iters);
  }
  if (const YAML::Node g = root["fss_gates"]) {
    r.keys(g, "fss_gates", {"lambda", "kappa", "lut_bits"});
    FssConstants& c = cal.fss_gates;
    c.lambda = r.get<int>(g, "lambda", c.lambda);
    c.kappa = r.number(g, "kappa", c.kappa, 0);
    c.lut_bits = r.get<int>(g, "lut_bits", c.lut_bits);
    if (c.lambda <= 0 || c.lut_bits <= 0) r.fail(g, "lambda and lut_bits must be positive");
  }
  if (const YAML::Node n = root["a2b"]) cal.a2b = read_mpc(r, n, "a2b");
  if (const YAML::Node n = root["fss"]) cal.fss = read_mpc(r, n, "fss");
  if (const YAML::Node n = root["fhe"]) {
    r.map(n, "fhe");
    for (const auto& kv : n) cal.fhe[parse_family(r, kv.first)] = read_fhe(r, kv.second);
  }
  out.power_map = default_phase_power_map();
  if (const YAML::Node m = root["energy_mapping"]) {
    r.map(m, "energy_mapping");
    for (const auto& kv : m) {
      PhaseKind kind{};
      r.wrap(kv.first, [&] { kind = parse_phase_kind(kv.first.as<std::string>()); });
      r.keys(kv.second, "energy_mapping entry", {"gpu", "cpu", "mem_io", "nic"});
      ComponentLevels levels{};
      for (int c = 0; c < kComponentCount; ++c) {
        const std::string comp(to_string(static_cast<Component>(c)));
        const YAML::Node v = kv.second[comp];
        if (!v) r.fail(kv.second, "missing component '" + comp + "'");
        r.wrap(v, [&] { levels[static_cast<size_t>(c)] = parse_power_level(v.as<std::string>()); });
      }
      out.power_map.levels[kind] = levels;
    }
  }
  return out;
}

CalibrationBundle load_calibration_file(const std::string& path) {
  const std::string text = read_text_file(path);
  CalibrationBundle b = parse_calibration(text, path);
  b.cal.source_hash = sha256_hex(text);
  return b;
}

std::string emit_calibration(const CalibrationBundle& b) {
  const Calibration& cal = b.cal;
  YAML::Emitter e;
  e.SetDoublePrecision(10);
  e << YAML::BeginMap;
  e << YAML::Key << "schema" << YAML::Value << std::string(kCalibrationSchema);
  e << YAML::Key << "a2b_gates" << YAML::Value << YAML::Flow << YAML::BeginMap;
  e << YAML::Key << "r0" << YAML::Value << cal.a2b_gates.r0 << YAML::Key << "r1" << YAML::Value
    << cal.a2b_gates.r1 << YAML::Key << "c" << YAML::Value << cal.a2b_gates.c << YAML::Key
    << "c_offline" << YAML::Value << cal.a2b_gates.c_offline << YAML::Key << "exp_iters"
    << YAML::Value << cal.a2b_gates.exp_iters << YAML::Key << "recip_iters" << YAML::Value
    << cal.a2b_gates.recip_iters << YAML::Key << "rsqrt_iters" << YAML::Value
    << cal.a2b_gates.rsqrt_iters << YAML::EndMap;
  e << YAML::Key << "fss_gates" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key
    << "lambda" << YAML::Value << cal.fss_gates.lambda << YAML::Key << "kappa" << YAML::Value
    << cal.fss_gates.kappa << YAML::Key << "lut_bits" << YAML::Value << cal.fss_gates.lut_bits
    << YAML::EndMap;
  e << YAML::Key << "a2b" << YAML::Value;
  emit_mpc(e, cal.a2b);
  e << YAML::Key << "fss" << YAML::Value;
  emit_mpc(e, cal.fss);
  e << YAML::Key << "fhe" << YAML::Value << YAML::BeginMap;
  for (const auto& [f, be] : cal.fhe) {
    e << YAML::Key << std::string(to_string(f)) << YAML::Value;
    emit_fhe(e, be);
  }
  e << YAML::EndMap;
  e << YAML::Key << "energy_mapping" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, levels] : b.power_map.levels) {
    e << YAML::Key << std::string(to_string(k)) << YAML::Value << YAML::Flow << YAML::BeginMap;
    for (int c = 0; c < kComponentCount; ++c)
      e << YAML::Key << std::string(to_string(static_cast<Component>(c))) << YAML::Value
        << std::string(to_string(levels[static_cast<size_t>(c)]));
    e << YAML::EndMap;
  }
  e << YAML::EndMap << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

// ---------------------------------------------------------------------------

namespace {

ComponentPower read_component(const Reader& r, const YAML::Node& n, ComponentPower d) {
  r.keys(n, "power component", {"high", "medium", "low"});
  d.high = r.number(n, "high", d.high, 0);
  d.medium = r.number(n, "medium", d.medium, 0);
  d.low = r.number(n, "low", d.low, 0);
  return d;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  const Reader r(origin);
  const YAML::Node root = load_yaml(text, origin);
  Scenario s;
  if (root.IsNull()) return s;
  r.keys(root, "scenario", {"model", "scheme", "network", "pool", "prices", "power"});

  if (const YAML::Node m = root["model"]) {
    r.keys(m, "model", {"name", "file", "seq_len", "batch", "include_max"});
    s.model = r.get<std::string>(m, "name", s.model);
    s.model_file = r.get<std::string>(m, "file", "");
    s.seq_len = r.get<std::int64_t>(m, "seq_len", s.seq_len);
    s.batch = r.get<std::int64_t>(m, "batch", s.batch);
    if (s.seq_len < 1) r.fail(m["seq_len"], "seq_len must be >= 1");
    if (s.batch < 1) r.fail(m["batch"], "batch must be >= 1");
    if (m["include_max"]) s.include_max = r.get<bool>(m, "include_max", true);
  }
  if (const YAML::Node n = root["scheme"]) {
    r.keys(n, "scheme", {"name", "include_offline", "calibration"});
    const YAML::Node name = n["name"];
    if (name) r.wrap(name, [&] { s.scheme = parse_scheme(name.as<std::string>()); });
    s.include_offline = r.get<bool>(n, "include_offline", false);
    s.calibration = r.get<std::string>(n, "calibration", "");
  }
  if (const YAML::Node n = root["network"]) {
    r.keys(n, "network", {"preset", "name", "rtt_s", "bandwidth_Bps"});
    if (const YAML::Node p = n["preset"]) {
      if (n["rtt_s"] || n["bandwidth_Bps"]) r.fail(n, "give either a preset or rtt_s/bandwidth_Bps");
      r.wrap(p, [&] { s.net = preset(p.as<std::string>()); });
    } else {
      const double rtt = r.require<double>(n, "rtt_s");
      const double bw = r.require<double>(n, "bandwidth_Bps");
      r.wrap(n, [&] { s.net = make_network(r.get<std::string>(n, "name", "custom"), rtt, bw); });
    }
  }
  if (const YAML::Node n = root["pool"]) {
    r.keys(n, "pool",
           {"capacity_GB", "initial_GB", "dealer_gen_GBps", "link_GBps", "disk_read_GBps",
            "mean_interarrival_s", "n_jobs", "seed", "online_workers"});
    s.pool_given = true;
    s.pool.capacity_bytes = r.number(n, "capacity_GB", 0, 0) * 1e9;
    s.pool.initial_level_bytes = n["initial_GB"] ? r.number(n, "initial_GB", 0, 0) * 1e9 : -1;
    s.pool.dealer_gen_Bps = r.number(n, "dealer_gen_GBps", 0, 0) * 1e9;
    s.pool.link_Bps = r.number(n, "link_GBps", 0, 0) * 1e9;
    if (n["disk_read_GBps"]) {
      const double d = r.number(n, "disk_read_GBps", 0, 0);
      if (!(d > 0)) r.fail(n["disk_read_GBps"], "disk_read_GBps must be positive");
      s.pool.disk_read_Bps = d * 1e9;
    }
    s.jobs.mean_interarrival_s = r.number(n, "mean_interarrival_s", 10, 0);
    if (!(s.jobs.mean_interarrival_s > 0)) r.fail(n["mean_interarrival_s"], "must be positive");
    s.jobs.n_jobs = r.get<int>(n, "n_jobs", 200);
    if (s.jobs.n_jobs < 0) r.fail(n["n_jobs"], "n_jobs must be >= 0");
    s.jobs.seed = r.get<std::uint64_t>(n, "seed", 1);
    s.online_workers = r.get<int>(n, "online_workers", 1);
    if (s.online_workers < 1) r.fail(n["online_workers"], "online_workers must be >= 1");
  }
  if (const YAML::Node n = root["prices"]) {
    r.keys(n, "prices",
           {"instance_per_s", "storage_per_s_per_5TB", "fast_port_per_s", "transfer_per_GB",
            "wan_transit_J_per_GB", "storage_TB"});
    PriceTable& p = s.prices;
    p.instance_per_s = r.number(n, "instance_per_s", p.instance_per_s, 0);
    p.storage_per_s_per_5TB = r.number(n, "storage_per_s_per_5TB", p.storage_per_s_per_5TB, 0);
    p.fast_port_per_s = r.number(n, "fast_port_per_s", p.fast_port_per_s, 0);
    p.transfer_per_GB = r.number(n, "transfer_per_GB", p.transfer_per_GB, 0);
    p.wan_transit_J_per_GB = r.number(n, "wan_transit_J_per_GB", p.wan_transit_J_per_GB, 0);
    s.storage_TB = r.number(n, "storage_TB", s.storage_TB, 0);
  }
  if (const YAML::Node n = root["power"]) {
    r.keys(n, "power", {"gpu", "cpu", "mem_io", "nic", "nic_count"});
    PowerTable& p = s.power;
    if (n["gpu"]) p.gpu = read_component(r, n["gpu"], p.gpu);
    if (n["cpu"]) p.cpu = read_component(r, n["cpu"], p.cpu);
    if (n["mem_io"]) p.mem_io = read_component(r, n["mem_io"], p.mem_io);
    if (n["nic"]) p.nic = read_component(r, n["nic"], p.nic);
    p.nic_count = r.get<int>(n, "nic_count", p.nic_count);
    r.wrap(n, [&] { p.validate(); });
  }
  return s;
}

Anchors parse_anchors(const std::string& text, const std::string& origin) {
  const Reader r(origin);
  const YAML::Node root = load_yaml(text, origin);
  r.keys(root, "anchors", {"schema", "networks", "throughput_batch", "models"});
  if (r.require<std::string>(root, "schema") != "ppml-anchors/1")
    r.fail(root["schema"], "unsupported anchors schema");
  Anchors a;
  const auto nets = r.require<std::vector<std::string>>(root, "networks");
  for (const auto& n : nets) r.wrap(root["networks"], [&] { a.networks.push_back(preset(n)); });
  a.throughput_batch = r.get<std::int64_t>(root, "throughput_batch", 128);
  if (a.throughput_batch < 1) r.fail(root["throughput_batch"], "throughput_batch must be >= 1");
  const YAML::Node models = root["models"];
  if (!models) r.fail(root, "missing key 'models'");
  r.map(models, "models");
  auto series = [&](const YAML::Node& n, const char* key) {
    std::vector<double> v;
    if (!n[key]) return v;
    v = r.as<std::vector<double>>(n[key], key);
    if (v.size() != a.networks.size()) r.fail(n[key], std::string("'") + key + "' needs one value per network");
    for (double x : v)
      if (!(x > 0) || !std::isfinite(x)) r.fail(n[key], std::string("'") + key + "' values must be positive");
    return v;
  };
  for (const auto& kv : models) {
    ModelAnchors m;
    r.keys(kv.second, "model anchors", {"a2b", "fss", "fhe"});
    for (const char* sch : {"a2b", "fss"}) {
      const YAML::Node n = kv.second[sch];
      if (!n) continue;
      r.keys(n, sch, {"online", "online_offline", "throughput_online", "throughput_online_offline"});
      m.mpc[parse_scheme(sch)] = {series(n, "online"), series(n, "online_offline"),
                                  series(n, "throughput_online"),
                                  series(n, "throughput_online_offline")};
    }
    if (const YAML::Node f = kv.second["fhe"]) {
      r.keys(f, "fhe", {"latency", "weight"});
      m.fhe_latency_s = r.number(f, "latency", 0, 0);
      m.fhe_weight = r.number(f, "weight", 1, 0);
    }
    a.models[kv.first.as<std::string>()] = std::move(m);
  }
  return a;
}

Anchors load_anchors_file(const std::string& path) {
  return parse_anchors(read_text_file(path), path);
}

std::string default_anchors_path() { return std::string(PPML_DATA_DIR) + "/anchors.yaml"; }

Scenario load_scenario_file(const std::string& path) {
  return parse_scenario(read_text_file(path), path);
}

}  // namespace ppml
