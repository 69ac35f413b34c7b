// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Calibration and scenario files (YAML). Parsing is strict: unknown keys
// are errors, and every error message starts with "<origin>:<line>:".

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ppml/costkit.hpp"
#include "ppml/netmodel.hpp"
#include "ppml/protocols.hpp"
#include "ppml/simkit.hpp"

namespace ppml {

inline constexpr std::string_view kCalibrationSchema = "ppml-calibration/1";

struct CalibrationBundle {
  Calibration cal;
  PhasePowerMap power_map;
};

CalibrationBundle parse_calibration(const std::string& text, const std::string& origin);
// Reads the file and records its SHA-256 in cal.source_hash.
CalibrationBundle load_calibration_file(const std::string& path);
std::string emit_calibration(const CalibrationBundle& b);

// $PPML_CALIBRATION if set, otherwise the calibration shipped in data/.
std::string default_calibration_path();

std::string sha256_hex(std::string_view data);
std::string read_text_file(const std::string& path);  // throws ConfigError

struct Scenario {
  // model
  std::string model = "bert_tiny";
  std::string model_file;  // text graph; overrides the builtin name
  std::int64_t seq_len = 128;
  std::int64_t batch = 1;
  std::optional<bool> include_max;
  // scheme
  Scheme scheme = Scheme::kA2b;
  bool include_offline = false;
  std::string calibration;  // path; empty means the default
  // network
  NetworkConfig net = preset("wan_m");
  // pool
  KeyPool pool;
  JobStream jobs;
  int online_workers = 1;
  bool pool_given = false;
  // prices
  PriceTable prices;
  double storage_TB = 5;
  // power
  PowerTable power;
};

// Reference measurements the calibration is fitted against.
struct AnchorSeries {
  std::vector<double> online;                     // latency per query, s
  std::vector<double> online_offline;             // latency per query, s
  std::vector<double> throughput_online;          // samples/s at throughput_batch
  std::vector<double> throughput_online_offline;  // samples/s at throughput_batch
};
struct ModelAnchors {
  std::map<Scheme, AnchorSeries> mpc;  // a2b, fss
  double fhe_latency_s = 0;
  double fhe_weight = 1;
};
struct Anchors {
  std::vector<NetworkConfig> networks;
  std::int64_t throughput_batch = 128;
  std::map<std::string, ModelAnchors> models;
};
Anchors parse_anchors(const std::string& text, const std::string& origin);
Anchors load_anchors_file(const std::string& path);
std::string default_anchors_path();

// Fits the scale, batch and FHE per-op fields of `base` to the anchors.
// Backend weights in `base` (s_per_mac, s_per_nl_byte, s_per_offline_byte)
// act as priors that fix the per-layer split. Appends one human-readable
// line per fitted row to `log` when given.
CalibrationBundle fit_calibration(const Anchors& anchors, const CalibrationBundle& base,
                                  std::vector<std::string>* log = nullptr);

Scenario parse_scenario(const std::string& text, const std::string& origin);
Scenario load_scenario_file(const std::string& path);

}  // namespace ppml
