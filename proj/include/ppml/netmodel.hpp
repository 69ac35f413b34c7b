// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ppml {

struct NetworkConfig {
  std::string name;
  double rtt_s = 0.0;
  double bandwidth_Bps = 1.0;
};

// Validated constructor: rtt finite and >= 0, bandwidth finite and > 0.
NetworkConfig make_network(std::string name, double rtt_s, double bandwidth_Bps);

// wan_s, wan_m, wan_f, lan_s, lan_f (case-insensitive). Throws ConfigError.
NetworkConfig preset(std::string_view name);
std::vector<std::string> preset_names();

// One round costs a full RTT; serialization is additive.
double comm_time(double rounds, double bytes, const NetworkConfig& cfg);

// Coarse link class used to pick CPU/NIC power states and port pricing.
enum class LinkTier { kLow, kMedium, kHigh };
LinkTier link_tier(const NetworkConfig& cfg);
// Whether the link needs a dedicated high-speed port.
bool uses_fast_port(const NetworkConfig& cfg);

}  // namespace ppml
