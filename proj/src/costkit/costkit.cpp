// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppml/costkit.hpp"

#include <string>

#include "ppml/error.hpp"

namespace ppml {

namespace {

constexpr std::pair<Component, std::string_view> kComponentNames[] = {
    {Component::kGpu, "gpu"},
    {Component::kCpu, "cpu"},
    {Component::kMemIo, "mem_io"},
    {Component::kNic, "nic"},
};

constexpr std::pair<PowerLevel, std::string_view> kLevelNames[] = {
    {PowerLevel::kHigh, "high"},
    {PowerLevel::kMedium, "medium"},
    {PowerLevel::kLow, "low"},
    {PowerLevel::kTiered, "tiered"},
};

void check_component(const ComponentPower& c, std::string_view name) {
  if (!(c.high >= c.medium && c.medium >= c.low && c.low >= 0))
    throw ConfigError("power table for " + std::string(name) +
                      " must satisfy high >= medium >= low >= 0");
}

}  // namespace

std::string_view to_string(Component c) {
  for (const auto& [k, n] : kComponentNames)
    if (k == c) return n;
  return "?";
}

Component parse_component(std::string_view name) {
  for (const auto& [k, n] : kComponentNames)
    if (n == name) return k;
  throw ConfigError("unknown component '" + std::string(name) + "'");
}

std::string_view to_string(PowerLevel l) {
  for (const auto& [k, n] : kLevelNames)
    if (k == l) return n;
  return "?";
}

PowerLevel parse_power_level(std::string_view name) {
  for (const auto& [k, n] : kLevelNames)
    if (n == name) return k;
  throw ConfigError("unknown power level '" + std::string(name) + "'");
}

void PowerTable::validate() const {
  check_component(gpu, "gpu");
  check_component(cpu, "cpu");
  check_component(mem_io, "mem_io");
  check_component(nic, "nic");
  if (nic_count < 0) throw ConfigError("nic_count must be >= 0");
}

const ComponentPower& PowerTable::of(Component c) const {
  switch (c) {
    case Component::kGpu:
      return gpu;
    case Component::kCpu:
      return cpu;
    case Component::kMemIo:
      return mem_io;
    case Component::kNic:
      return nic;
  }
  return gpu;
}

double PowerTable::watts(Component c, PowerLevel level, LinkTier tier) const {
  if (level == PowerLevel::kTiered) {
    level = tier == LinkTier::kHigh     ? PowerLevel::kHigh
            : tier == LinkTier::kMedium ? PowerLevel::kMedium
                                        : PowerLevel::kLow;
  }
  const ComponentPower& p = of(c);
  const double w = level == PowerLevel::kHigh     ? p.high
                   : level == PowerLevel::kMedium ? p.medium
                                                  : p.low;
  return c == Component::kNic ? w * nic_count : w;
}

PhasePowerMap default_phase_power_map() {
  using L = PowerLevel;
  PhasePowerMap m;
  // Order: gpu, cpu, mem_io, nic.
  m.levels[PhaseKind::kGpuComputeHeavy] = {L::kHigh, L::kLow, L::kLow, L::kLow};
  m.levels[PhaseKind::kGpuComputeLight] = {L::kMedium, L::kMedium, L::kMedium, L::kLow};
  m.levels[PhaseKind::kCpuCompute] = {L::kLow, L::kHigh, L::kMedium, L::kLow};
  m.levels[PhaseKind::kCommActive] = {L::kLow, L::kTiered, L::kTiered, L::kTiered};
  m.levels[PhaseKind::kCommWaitIdle] = {L::kLow, L::kLow, L::kLow, L::kLow};
  m.levels[PhaseKind::kDiskRead] = {L::kLow, L::kMedium, L::kMedium, L::kLow};
  m.levels[PhaseKind::kOfflineKeygen] = {L::kMedium, L::kMedium, L::kMedium, L::kLow};
  m.levels[PhaseKind::kOfflineTransfer] = {L::kLow, L::kTiered, L::kTiered, L::kTiered};
  return m;
}

double EnergyBreakdown::total() const {
  double s = 0;
  for (const auto& [k, row] : joules)
    for (double j : row) s += j;
  return s;
}

double EnergyBreakdown::component(Component c) const {
  double s = 0;
  for (const auto& [k, row] : joules) s += row[static_cast<size_t>(c)];
  return s;
}

double EnergyBreakdown::phase(PhaseKind k) const {
  auto it = joules.find(k);
  if (it == joules.end()) return 0;
  double s = 0;
  for (double j : it->second) s += j;
  return s;
}

EnergyBreakdown EnergyBreakdown::per_item(double n) const {
  EnergyBreakdown e = *this;
  for (auto& [k, row] : e.joules)
    for (double& j : row) j /= n;
  e.idle_wait_j /= n;
  return e;
}

EnergyBreakdown energy(const PhaseTimeline& t, const PowerTable& pt, const PhasePowerMap& map,
                       LinkTier tier) {
  pt.validate();
  EnergyBreakdown e;
  for (const auto& ph : t.phases) {
    auto it = map.levels.find(ph.kind);
    if (it == map.levels.end())
      throw ConfigError("phase kind '" + std::string(to_string(ph.kind)) +
                        "' has no power mapping");
    auto& row = e.joules[ph.kind];
    for (int c = 0; c < kComponentCount; ++c) {
      const double j = ph.duration_s * pt.watts(static_cast<Component>(c), it->second[c], tier);
      row[static_cast<size_t>(c)] += j;
      if (ph.kind == PhaseKind::kCommWaitIdle ||
          (ph.kind == PhaseKind::kCommActive && c == static_cast<int>(Component::kGpu)))
        e.idle_wait_j += j;
    }
  }
  return e;
}

void PriceTable::validate() const {
  if (!(instance_per_s >= 0 && storage_per_s_per_5TB >= 0 && fast_port_per_s >= 0 &&
        transfer_per_GB >= 0 && wan_transit_J_per_GB >= 0))
    throw ConfigError("prices must be >= 0");
}

CostBreakdown CostBreakdown::per_item(double n) const {
  return {instance / n, storage / n, port / n, transfer_online / n, transfer_offline / n};
}

CostBreakdown money(const PhaseTimeline& t, const Traffic& traffic, const NetworkConfig& cfg,
                    const PriceTable& pr, double storage_TB) {
  pr.validate();
  if (!(storage_TB >= 0)) throw ConfigError("storage_TB must be >= 0");
  const double dur = t.total_latency_s();
  CostBreakdown c;
  c.instance = dur * pr.instance_per_s;
  c.storage = dur * pr.storage_per_s_per_5TB * storage_TB / 5.0;
  c.port = uses_fast_port(cfg) ? dur * pr.fast_port_per_s : 0.0;
  c.transfer_online = traffic.online_bytes / 1e9 * pr.transfer_per_GB;
  c.transfer_offline = traffic.offline_bytes / 1e9 * pr.transfer_per_GB;
  return c;
}

double wan_transit_energy(double bytes, const PriceTable& pr) {
  if (!(bytes >= 0)) throw ConfigError("bytes must be >= 0");
  return bytes / 1e9 * pr.wan_transit_J_per_GB;
}

}  // namespace ppml
