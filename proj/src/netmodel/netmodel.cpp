// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppml/netmodel.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include "ppml/error.hpp"

namespace ppml {
namespace {

struct Preset {
  const char* name;
  double rtt_s;
  double bandwidth_Bps;
};

constexpr std::array<Preset, 5> kPresets{{
    {"lan_s", 2e-5, 1e9},
    {"lan_f", 2e-5, 50e9},
    {"wan_s", 0.07, 70e6},
    {"wan_m", 0.07, 1e9},
    {"wan_f", 0.07, 50e9},
}};

constexpr double kHighTierBps = 10e9;
constexpr double kMediumTierBps = 0.5e9;

}  // namespace

NetworkConfig make_network(std::string name, double rtt_s, double bandwidth_Bps) {
  if (!std::isfinite(rtt_s) || rtt_s < 0)
    throw ConfigError("network '" + name + "': rtt must be finite and >= 0");
  if (!std::isfinite(bandwidth_Bps) || bandwidth_Bps <= 0)
    throw ConfigError("network '" + name + "': bandwidth must be finite and > 0");
  return NetworkConfig{std::move(name), rtt_s, bandwidth_Bps};
}

NetworkConfig preset(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (const auto& p : kPresets)
    if (lower == p.name) return make_network(p.name, p.rtt_s, p.bandwidth_Bps);
  throw ConfigError("unknown network preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : kPresets) names.emplace_back(p.name);
  return names;
}

double comm_time(double rounds, double bytes, const NetworkConfig& cfg) {
  return rounds * cfg.rtt_s + bytes / cfg.bandwidth_Bps;
}

LinkTier link_tier(const NetworkConfig& cfg) {
  if (cfg.bandwidth_Bps >= kHighTierBps) return LinkTier::kHigh;
  if (cfg.bandwidth_Bps >= kMediumTierBps) return LinkTier::kMedium;
  return LinkTier::kLow;
}

bool uses_fast_port(const NetworkConfig& cfg) {
  return link_tier(cfg) == LinkTier::kHigh;
}

}  // namespace ppml
