// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Phase timelines for single inferences and batches, and a deterministic
// event-driven simulation of jobs drawing single-use keys from a pool that
// a dealer refills.

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ppml/netmodel.hpp"
#include "ppml/protocols.hpp"

namespace ppml {

enum class PhaseKind {
  kGpuComputeHeavy,
  kGpuComputeLight,
  kCpuCompute,
  kCommActive,
  kCommWaitIdle,
  kDiskRead,
  kOfflineKeygen,
  kOfflineTransfer,
};
inline constexpr int kPhaseKindCount = 8;

std::string_view to_string(PhaseKind k);
PhaseKind parse_phase_kind(std::string_view name);  // throws ConfigError
std::vector<PhaseKind> all_phase_kinds();

struct Phase {
  PhaseKind kind = PhaseKind::kCpuCompute;
  std::string layer;
  double duration_s = 0;
  double bytes = 0;
};

struct PhaseTimeline {
  std::vector<Phase> phases;

  double total_latency_s() const;
  double duration(PhaseKind k) const;
  double bytes(PhaseKind k) const;
};

struct InferenceOptions {
  // Prepend the dealer phases (key generation and key transfer).
  bool include_offline = false;
  // Keys are streamed from a disk tier at this rate during the online phase.
  std::optional<double> disk_read_Bps;
};

// Per layer: [disk read] -> compute -> active transfer -> RTT wait. FHE
// compute is heavy GPU work, MPC compute is light GPU work.
PhaseTimeline run_inference(const CostProfile& p, const NetworkConfig& cfg,
                            const InferenceOptions& opts = {});

// Samples per second for one batch-sized profile.
double throughput(const CostProfile& p, const NetworkConfig& cfg,
                  const InferenceOptions& opts = {});

// throughput(batch) / throughput(1) for a builtin model.
double batching_gain(std::string_view model, Scheme scheme, const NetworkConfig& cfg,
                     const Calibration& cal, std::int64_t batch = 128,
                     const InferenceOptions& opts = {});

struct CollapseRates {
  double online_qps = 0;
  double online_plus_offline_qps = 0;
  double ratio() const { return online_qps / online_plus_offline_qps; }
};
// Steady-state rates while keys last and once every batch must wait for
// its own keys.
CollapseRates effective_throughput_collapse(const CostProfile& p, const NetworkConfig& cfg,
                                            std::optional<double> disk_read_Bps = std::nullopt);

// ---------------------------------------------------------------------------
// Key-pool queue

struct KeyPool {
  double capacity_bytes = 0;
  // Starting stock; negative means "start full".
  double initial_level_bytes = -1;
  double dealer_gen_Bps = 0;  // <= 0 means unbounded
  double link_Bps = 0;        // dealer-to-server link
  std::optional<double> disk_read_Bps;

  double refill_Bps() const;
};

struct JobStream {
  std::uint64_t seed = 1;
  double mean_interarrival_s = 10;
  int n_jobs = 200;
};

struct Job {
  int id = 0;
  std::string model;
  std::int64_t batch = 1;
  double arrival_s = 0;
  double key_demand_bytes = 0;
  double start_s = 0;
  double finish_s = 0;

  double wait_s() const { return start_s - arrival_s; }
  double response_s() const { return finish_s - arrival_s; }
};

enum class EventKind { kArrival, kStart, kFinish, kPoolFull };
std::string_view to_string(EventKind k);

struct Event {
  double time_s = 0;
  EventKind kind = EventKind::kArrival;
  int job_id = -1;
  double pool_level_bytes = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

struct QueueResult {
  std::vector<Job> jobs;
  std::vector<Event> log;
  double keys_consumed_bytes = 0;
  double keys_generated_bytes = 0;
  double dealer_idle_s = 0;
  double min_pool_level_bytes = 0;

  double mean_wait_s() const;
  double max_wait_s() const;
  double mean_response_s() const;
};

struct QueueConfig {
  JobStream stream;
  KeyPool pool;
  std::string model;
  std::int64_t batch = 1;
  double service_s = 0;        // online time of one job
  double key_demand_bytes = 0; // per job
  int online_workers = 1;
};

// Poisson arrival times by inverse-CDF sampling on mt19937_64.
std::vector<double> poisson_arrivals(const JobStream& s);

// FIFO, non-preemptive. A job starts when a worker is free and the pool
// holds its whole key demand, which is reserved at start. Throws
// InfeasibleError when a job can never start.
QueueResult run_queue_sim(const QueueConfig& q);

// Service time, demand and link taken from the profile (keys for FSS,
// none otherwise) and the network.
QueueConfig make_queue_config(const CostProfile& p, const NetworkConfig& cfg, JobStream s,
                              KeyPool pool, int online_workers = 1);

// One record per event: time_s,kind,job_id,pool_level_bytes.
void write_event_log(std::ostream& os, const QueueResult& r);

}  // namespace ppml
