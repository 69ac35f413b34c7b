// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Energy and money accounting over phase timelines. All figures are for
// one party machine.

#pragma once

#include <array>
#include <map>
#include <string_view>

#include "ppml/netmodel.hpp"
#include "ppml/simkit.hpp"

namespace ppml {

enum class Component { kGpu, kCpu, kMemIo, kNic };
inline constexpr int kComponentCount = 4;
std::string_view to_string(Component c);
Component parse_component(std::string_view name);  // throws ConfigError

// high/medium/low are heavy/light/idle for the GPU and the high-speed,
// medium-speed and idle rows for the others. `tiered` follows the link.
enum class PowerLevel { kHigh, kMedium, kLow, kTiered };
std::string_view to_string(PowerLevel l);
PowerLevel parse_power_level(std::string_view name);  // throws ConfigError

struct ComponentPower {
  double high = 0;
  double medium = 0;
  double low = 0;
};

struct PowerTable {
  ComponentPower gpu{250, 50, 6};
  ComponentPower cpu{60, 25, 16};
  ComponentPower mem_io{15, 5, 3};
  ComponentPower nic{25, 10, 5};  // per NIC
  int nic_count = 1;

  // Throws ConfigError unless high >= medium >= low >= 0 everywhere.
  void validate() const;
  const ComponentPower& of(Component c) const;
  double watts(Component c, PowerLevel level, LinkTier tier) const;
};

using ComponentLevels = std::array<PowerLevel, kComponentCount>;

struct PhasePowerMap {
  std::map<PhaseKind, ComponentLevels> levels;
};
PhasePowerMap default_phase_power_map();

struct EnergyBreakdown {
  // joules[phase][component]
  std::map<PhaseKind, std::array<double, kComponentCount>> joules;
  // Energy burnt while waiting on the network: everything during RTT waits
  // plus the idle GPU during active transfers.
  double idle_wait_j = 0;

  double total() const;
  double component(Component c) const;
  double phase(PhaseKind k) const;
  double idle_wait_share() const { return total() > 0 ? idle_wait_j / total() : 0.0; }
  EnergyBreakdown per_item(double n) const;
};

// Throws ConfigError for a phase kind missing from the map.
EnergyBreakdown energy(const PhaseTimeline& t, const PowerTable& pt, const PhasePowerMap& map,
                       LinkTier tier);

struct PriceTable {
  double instance_per_s = 0.001;
  double storage_per_s_per_5TB = 9.6e-5;
  double fast_port_per_s = 0.0236;
  double transfer_per_GB = 0.02;
  double wan_transit_J_per_GB = 850;  // reported, never billed

  void validate() const;  // all >= 0
};

struct Traffic {
  double online_bytes = 0;
  double offline_bytes = 0;
};

struct CostBreakdown {
  double instance = 0;
  double storage = 0;
  double port = 0;
  double transfer_online = 0;
  double transfer_offline = 0;

  double transfer() const { return transfer_online + transfer_offline; }
  double total() const { return instance + storage + port + transfer(); }
  CostBreakdown per_item(double n) const;
};

// The port charge applies only to links that need a high-speed port.
CostBreakdown money(const PhaseTimeline& t, const Traffic& traffic, const NetworkConfig& cfg,
                    const PriceTable& pr, double storage_TB);

double wan_transit_energy(double bytes, const PriceTable& pr = {});

}  // namespace ppml
