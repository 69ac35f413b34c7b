// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>

#include "ppml/config.hpp"
#include "ppml/error.hpp"

using namespace ppml;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

const std::string kMinimalCalibration = "schema: ppml-calibration/1\n";

}  // namespace

TEST_CASE("sha256 known answers") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("shipped calibration loads and records its hash") {
  const std::string path = default_calibration_path();
  const CalibrationBundle b = load_calibration_file(path);
  CHECK(b.cal.source_hash == sha256_hex(read_text_file(path)));
  CHECK(b.cal.source_hash.size() == 64);
  CHECK(b.cal.a2b.backends.size() == 2);
  CHECK(b.cal.fss.backends.at(ModelFamily::kCnn).ring_bits == 32);
  CHECK(b.cal.fss.backends.at(ModelFamily::kTransformer).ring_bits == 64);
  CHECK(b.cal.fhe.at(ModelFamily::kTransformer).bootstrap > 0);
  CHECK(b.power_map.levels.size() == static_cast<size_t>(kPhaseKindCount));
}

TEST_CASE("calibration emit and parse round-trip") {
  const CalibrationBundle a = load_calibration_file(default_calibration_path());
  const CalibrationBundle b = parse_calibration(emit_calibration(a), "emitted");
  const NetworkConfig cfg = preset("wan_m");
  for (const auto& model : builtin_model_names())
    for (Scheme s : {Scheme::kA2b, Scheme::kFss, Scheme::kFhe}) {
      const double la = online_latency(builtin_profile(model, s, 4, a.cal), cfg);
      const double lb = online_latency(builtin_profile(model, s, 4, b.cal), cfg);
      CHECK(lb == doctest::Approx(la).epsilon(1e-9));
    }
  CHECK(b.power_map.levels == a.power_map.levels);
}

TEST_CASE("shipped calibration is in sync with the anchors") {
  const Anchors anchors = load_anchors_file(default_anchors_path());
  const CalibrationBundle priors =
      load_calibration_file(std::string(PPML_TEST_DATA_DIR) + "/calibration_priors.yaml");
  const CalibrationBundle fitted = fit_calibration(anchors, priors);
  const CalibrationBundle shipped = load_calibration_file(default_calibration_path());
  for (const auto& model : builtin_model_names())
    for (Scheme s : {Scheme::kA2b, Scheme::kFss, Scheme::kFhe})
      for (const auto& net : preset_names()) {
        const CostProfile pf = builtin_profile(model, s, 16, fitted.cal);
        const CostProfile ps = builtin_profile(model, s, 16, shipped.cal);
        CHECK(online_latency(ps, preset(net)) ==
              doctest::Approx(online_latency(pf, preset(net))).epsilon(1e-8));
        CHECK(offline_latency(ps, preset(net)) ==
              doctest::Approx(offline_latency(pf, preset(net))).epsilon(1e-8));
      }
}

TEST_CASE("fitted calibration reproduces the published online latencies") {
  const Anchors anchors = load_anchors_file(default_anchors_path());
  const Calibration cal = load_calibration_file(default_calibration_path()).cal;
  for (const auto& [model, ma] : anchors.models)
    for (const auto& [scheme, series] : ma.mpc) {
      const CostProfile p = builtin_profile(model, scheme, 1, cal);
      for (size_t i = 0; i < anchors.networks.size(); ++i) {
        CAPTURE(model);
        CAPTURE(to_string(scheme));
        CAPTURE(anchors.networks[i].name);
        CHECK(online_latency(p, anchors.networks[i]) == doctest::Approx(series.online[i]).epsilon(0.10));
        CHECK(online_latency(p, anchors.networks[i]) + offline_latency(p, anchors.networks[i]) ==
              doctest::Approx(series.online_offline[i]).epsilon(0.35));
      }
    }
}

TEST_CASE("calibration errors carry file, line and column") {
  const std::string text =
      "schema: ppml-calibration/1\n"
      "a2b_gates:\n"
      "  r0: 2\n"
      "  bogus: 3\n";
  const std::string msg = error_of([&] { parse_calibration(text, "cal.yaml"); });
  CHECK(starts_with(msg, "cal.yaml:4:"));
  CHECK(msg.find("bogus") != std::string::npos);

  CHECK(starts_with(error_of([] { parse_calibration("schema: other/2\n", "c.yaml"); }), "c.yaml:1:"));
  CHECK(starts_with(error_of([] { parse_calibration("a2b_gates: {}\n", "c.yaml"); }), "c.yaml:1:"));
  CHECK(starts_with(error_of([] { parse_calibration("schema: [unclosed\n", "c.yaml"); }), "c.yaml:"));
  const std::string bad_value = kMinimalCalibration + "fss_gates:\n  lambda: many\n";
  CHECK(starts_with(error_of([&] { parse_calibration(bad_value, "c.yaml"); }), "c.yaml:3:"));
  const std::string bad_level =
      kMinimalCalibration +
      "energy_mapping:\n  comm_active: {gpu: low, cpu: blazing, mem_io: low, nic: low}\n";
  CHECK(starts_with(error_of([&] { parse_calibration(bad_level, "c.yaml"); }), "c.yaml:3:"));
  const std::string bad_kind =
      kMinimalCalibration +
      "fhe:\n  cnn:\n    pt_mult: 1\n    ct_mult: 1\n    rotation: 1\n    bootstrap: 1\n"
      "    nonlinear:\n      swish: {ct_mults: 1, bootstraps: 0}\n";
  CHECK(starts_with(error_of([&] { parse_calibration(bad_kind, "c.yaml"); }), "c.yaml:9:"));
  const std::string no_latency = kMinimalCalibration + "fhe:\n  cnn:\n    ct_mult: 1\n";
  CHECK(starts_with(error_of([&] { parse_calibration(no_latency, "c.yaml"); }), "c.yaml:4:"));
  CHECK(starts_with(error_of([] { read_text_file("/nonexistent/x.yaml"); }), "/nonexistent/x.yaml:"));
}

TEST_CASE("minimal calibration falls back to defaults") {
  const CalibrationBundle b = parse_calibration(kMinimalCalibration, "min");
  CHECK(b.cal.a2b_gates.r0 == 2);
  CHECK(b.cal.fss_gates.lambda == 128);
  CHECK(b.power_map.levels == default_phase_power_map().levels);
}

TEST_CASE("scenario sections") {
  const std::string text =
      "model: {name: resnet50, batch: 128}\n"
      "scheme: {name: fss, include_offline: true}\n"
      "network: {preset: wan_s}\n"
      "pool:\n"
      "  capacity_GB: 100\n"
      "  link_GBps: 0.07\n"
      "  disk_read_GBps: 1\n"
      "  mean_interarrival_s: 10\n"
      "  n_jobs: 200\n"
      "  seed: 9\n"
      "  online_workers: 3\n"
      "prices: {instance_per_s: 0.002, storage_TB: 10}\n"
      "power:\n"
      "  gpu: {high: 300}\n"
      "  nic_count: 2\n";
  const Scenario s = parse_scenario(text, "s.yaml");
  CHECK(s.model == "resnet50");
  CHECK(s.batch == 128);
  CHECK(s.scheme == Scheme::kFss);
  CHECK(s.include_offline);
  CHECK(s.net.name == preset("wan_s").name);
  CHECK(s.pool_given);
  CHECK(s.pool.capacity_bytes == 100e9);
  CHECK(s.pool.initial_level_bytes < 0);
  CHECK(s.pool.link_Bps == doctest::Approx(7e7));
  REQUIRE(s.pool.disk_read_Bps);
  CHECK(*s.pool.disk_read_Bps == 1e9);
  CHECK(s.jobs.seed == 9);
  CHECK(s.jobs.n_jobs == 200);
  CHECK(s.online_workers == 3);
  CHECK(s.prices.instance_per_s == 0.002);
  CHECK(s.prices.transfer_per_GB == 0.02);
  CHECK(s.storage_TB == 10);
  CHECK(s.power.gpu.high == 300);
  CHECK(s.power.gpu.medium == 50);
  CHECK(s.power.nic_count == 2);
}

TEST_CASE("empty scenario uses defaults") {
  const Scenario s = parse_scenario("", "empty");
  CHECK(s.model == "bert_tiny");
  CHECK(s.batch == 1);
  CHECK(s.net.name == preset("wan_m").name);
  CHECK_FALSE(s.pool_given);
}

TEST_CASE("explicit network") {
  const Scenario s = parse_scenario("network: {rtt_s: 0.01, bandwidth_Bps: 2.0e8}\n", "n");
  CHECK(s.net.rtt_s == 0.01);
  CHECK(s.net.bandwidth_Bps == 2e8);
  CHECK(starts_with(error_of([] { parse_scenario("network: {rtt_s: 0.01}\n", "n.yaml"); }), "n.yaml:1:"));
  CHECK(starts_with(
      error_of([] { parse_scenario("network: {preset: wan_s, rtt_s: 1}\n", "n.yaml"); }), "n.yaml:1:"));
  CHECK(starts_with(error_of([] { parse_scenario("network: {preset: moon}\n", "n.yaml"); }), "n.yaml:1:"));
  CHECK(starts_with(
      error_of([] { parse_scenario("network:\n  rtt_s: -1\n  bandwidth_Bps: 1\n", "n.yaml"); }),
      "n.yaml:"));
}

TEST_CASE("scenario errors are line-anchored") {
  const std::string unknown =
      "model: {name: bert_tiny}\n"
      "pool:\n"
      "  capacity_GB: 10\n"
      "  capacity_gb: 10\n";
  const std::string msg = error_of([&] { parse_scenario(unknown, "bad.yaml"); });
  CHECK(starts_with(msg, "bad.yaml:4:"));
  CHECK(msg.find("capacity_gb") != std::string::npos);

  CHECK(starts_with(error_of([] { parse_scenario("oops: 1\n", "b.yaml"); }), "b.yaml:1:"));
  CHECK(starts_with(error_of([] { parse_scenario("model:\n  batch: 0\n", "b.yaml"); }), "b.yaml:2:"));
  CHECK(starts_with(error_of([] { parse_scenario("scheme: {name: quantum}\n", "b.yaml"); }), "b.yaml:1:"));
  CHECK(starts_with(error_of([] { parse_scenario("model: [1, 2\n", "b.yaml"); }), "b.yaml:"));
  CHECK(starts_with(error_of([] { parse_scenario("power:\n  cpu: {medium: 90}\n", "b.yaml"); }), "b.yaml:2:"));
  CHECK(starts_with(error_of([] { parse_scenario("prices:\n  transfer_per_GB: -1\n", "b.yaml"); }),
                    "b.yaml:2:"));
  CHECK(starts_with(error_of([] { parse_scenario("pool:\n  online_workers: 0\n", "b.yaml"); }),
                    "b.yaml:2:"));
}

TEST_CASE("anchors file") {
  const Anchors a = load_anchors_file(default_anchors_path());
  CHECK(a.networks.size() == 5);
  CHECK(a.throughput_batch == 128);
  CHECK(a.models.size() == 4);
  CHECK(a.models.at("bert_tiny").mpc.at(Scheme::kA2b).online[2] == 33);
  CHECK(a.models.at("resnet20").fhe_latency_s == 1.7);

  const std::string short_row =
      "schema: ppml-anchors/1\n"
      "networks: [lan_s, lan_f, wan_s]\n"
      "models:\n"
      "  bert_tiny:\n"
      "    a2b: {online: [1, 2]}\n";
  CHECK(starts_with(error_of([&] { parse_anchors(short_row, "a.yaml"); }), "a.yaml:5:"));
}
