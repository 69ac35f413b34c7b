// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>

#include "ppml/config.hpp"
#include "ppml/error.hpp"
#include "ppml/simkit.hpp"

using namespace ppml;

namespace {

const Calibration& shipped() {
  static const Calibration cal = load_calibration_file(default_calibration_path()).cal;
  return cal;
}

}  // namespace

TEST_CASE("phase kinds round-trip through their names") {
  CHECK(all_phase_kinds().size() == static_cast<size_t>(kPhaseKindCount));
  for (PhaseKind k : all_phase_kinds()) CHECK(parse_phase_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_phase_kind("napping"), ConfigError);
}

TEST_CASE("empty profile gives an empty timeline") {
  CostProfile p;
  const PhaseTimeline t = run_inference(p, preset("wan_m"));
  CHECK(t.phases.empty());
  CHECK(t.total_latency_s() == 0);
}

TEST_CASE("timeline decomposes into compute and comm_time") {
  const NetworkConfig cfg = preset("wan_m");
  const CostProfile p = builtin_profile("bert_tiny", Scheme::kA2b, 1, shipped());
  const PhaseTimeline t = run_inference(p, cfg);
  const double want = p.online_compute_s() + comm_time(p.totals.online_rounds, p.totals.online_bytes, cfg);
  CHECK(t.total_latency_s() == doctest::Approx(want).epsilon(1e-12));
  CHECK(t.bytes(PhaseKind::kCommActive) == doctest::Approx(p.totals.online_bytes).epsilon(1e-12));
  CHECK(t.duration(PhaseKind::kCommWaitIdle) ==
        doctest::Approx(p.totals.online_rounds * cfg.rtt_s).epsilon(1e-12));
  CHECK(t.duration(PhaseKind::kGpuComputeHeavy) == 0);
  for (const auto& ph : t.phases) CHECK(ph.duration_s >= 0);
  // Published online latency for this row is 32 s.
  CHECK(t.total_latency_s() == doctest::Approx(32).epsilon(0.10));
}

TEST_CASE("offline phases lead the timeline when requested") {
  const NetworkConfig cfg = preset("wan_s");
  const CostProfile p = builtin_profile("resnet20", Scheme::kFss, 1, shipped());
  InferenceOptions opts;
  opts.include_offline = true;
  const PhaseTimeline t = run_inference(p, cfg, opts);
  REQUIRE(t.phases.size() >= 2);
  CHECK(t.phases[0].kind == PhaseKind::kOfflineKeygen);
  CHECK(t.phases[1].kind == PhaseKind::kOfflineTransfer);
  CHECK(t.bytes(PhaseKind::kOfflineTransfer) == p.totals.offline_bytes);
  CHECK(t.total_latency_s() ==
        doctest::Approx(online_latency(p, cfg) + offline_latency(p, cfg)).epsilon(1e-12));
  // Published online+offline latency for this row is 9.4 s.
  CHECK(t.total_latency_s() == doctest::Approx(9.4).epsilon(0.15));
}

TEST_CASE("fhe compute is heavy and identical on every preset") {
  const CostProfile p = builtin_profile("resnet20", Scheme::kFhe, 1, shipped());
  double ref = -1;
  for (const auto& name : preset_names()) {
    const PhaseTimeline t = run_inference(p, preset(name));
    CHECK(t.duration(PhaseKind::kGpuComputeLight) == 0);
    if (ref < 0) ref = t.duration(PhaseKind::kGpuComputeHeavy);
    CHECK(t.duration(PhaseKind::kGpuComputeHeavy) == ref);
    CHECK(t.total_latency_s() == doctest::Approx(1.7).epsilon(0.10));
  }
}

TEST_CASE("compute speedup divides compute phases only") {
  const NetworkConfig cfg = preset("lan_f");
  CostProfile p = builtin_profile("resnet50", Scheme::kA2b, 1, shipped());
  const PhaseTimeline a = run_inference(p, cfg);
  p.compute_speedup = 4;
  const PhaseTimeline b = run_inference(p, cfg);
  CHECK(b.duration(PhaseKind::kGpuComputeLight) ==
        doctest::Approx(a.duration(PhaseKind::kGpuComputeLight) / 4).epsilon(1e-12));
  CHECK(b.duration(PhaseKind::kCommActive) == a.duration(PhaseKind::kCommActive));
  CHECK(b.duration(PhaseKind::kCommWaitIdle) == a.duration(PhaseKind::kCommWaitIdle));
}

TEST_CASE("throughput is batch over latency") {
  const NetworkConfig cfg = preset("wan_f");
  const CostProfile p = builtin_profile("resnet20", Scheme::kA2b, 128, shipped());
  CHECK(throughput(p, cfg) == doctest::Approx(128 / online_latency(p, cfg)).epsilon(1e-12));
  CHECK_THROWS_AS(throughput(CostProfile{}, cfg), ConfigError);
}

TEST_CASE("batching amortizes rounds") {
  const NetworkConfig wan_f = preset("wan_f");
  InferenceOptions with_offline;
  with_offline.include_offline = true;
  CHECK(batching_gain("resnet50", Scheme::kA2b, wan_f, shipped(), 128, with_offline) ==
        doctest::Approx(29).epsilon(0.20));
  CHECK(batching_gain("bert_base", Scheme::kA2b, wan_f, shipped(), 128, with_offline) ==
        doctest::Approx(51).epsilon(0.20));
  CHECK(batching_gain("resnet50", Scheme::kFss, wan_f, shipped()) == doctest::Approx(16).epsilon(0.25));
  CHECK(batching_gain("bert_base", Scheme::kFss, wan_f, shipped()) == doctest::Approx(25).epsilon(0.25));
  CHECK(batching_gain("resnet20", Scheme::kA2b, wan_f, shipped(), 1) == 1.0);
}

TEST_CASE("throughput collapse once keys run out") {
  const NetworkConfig wan_s = preset("wan_s");
  const CollapseRates c =
      effective_throughput_collapse(builtin_profile("resnet20", Scheme::kFss, 128, shipped()), wan_s);
  CHECK(c.online_qps == doctest::Approx(6.0).epsilon(0.25));
  CHECK(c.online_plus_offline_qps == doctest::Approx(0.4).epsilon(0.25));

  const CollapseRates f =
      effective_throughput_collapse(builtin_profile("resnet20", Scheme::kFhe, 1, shipped()), wan_s);
  CHECK(f.online_qps == f.online_plus_offline_qps);
  CHECK(f.ratio() == 1.0);
}

TEST_CASE("disk-tiered keys throttle online throughput") {
  const NetworkConfig wan_m = preset("wan_m");
  const CostProfile p = builtin_profile("bert_base", Scheme::kFss, 128, shipped());
  const double plain = throughput(p, wan_m);
  InferenceOptions disk;
  disk.disk_read_Bps = 1e9;
  const PhaseTimeline t = run_inference(p, wan_m, disk);
  CHECK(t.bytes(PhaseKind::kDiskRead) == doctest::Approx(p.totals.key_bytes).epsilon(1e-12));
  CHECK(throughput(p, wan_m, disk) / plain == doctest::Approx(0.12).epsilon(0.25));
  disk.disk_read_Bps = 0;
  CHECK_THROWS_AS(run_inference(p, wan_m, disk), ConfigError);
}

// ---------------------------------------------------------------------------

TEST_CASE("poisson arrivals are deterministic and have the requested mean") {
  JobStream s{42, 10.0, 20000};
  const auto a = poisson_arrivals(s);
  CHECK(a == poisson_arrivals(s));
  for (size_t i = 1; i < a.size(); ++i) CHECK(a[i] >= a[i - 1]);
  CHECK(a.back() / static_cast<double>(a.size()) == doctest::Approx(10.0).epsilon(0.03));
  s.seed = 43;
  CHECK(poisson_arrivals(s) != a);
  s.mean_interarrival_s = 0;
  CHECK_THROWS_AS(poisson_arrivals(s), ConfigError);
}

TEST_CASE("queue timings match a hand-derived single-worker schedule") {
  // Pool never fills, so keys for job i are ready at ((i + 1) d - L0) / r.
  QueueConfig q;
  q.stream = {7, 10.0, 50};
  q.pool.capacity_bytes = 1e15;
  q.pool.initial_level_bytes = 20;
  q.pool.link_Bps = 2;
  q.key_demand_bytes = 30;
  q.service_s = 4;
  const QueueResult r = run_queue_sim(q);
  const auto arrivals = poisson_arrivals(q.stream);
  double prev_finish = 0;
  for (size_t i = 0; i < arrivals.size(); ++i) {
    const double keys_ready = ((static_cast<double>(i) + 1) * 30 - 20) / 2;
    const double start = std::max({arrivals[i], prev_finish, keys_ready});
    CAPTURE(i);
    CHECK(r.jobs[i].arrival_s == arrivals[i]);
    CHECK(r.jobs[i].start_s == doctest::Approx(start).epsilon(1e-9));
    CHECK(r.jobs[i].finish_s == doctest::Approx(start + 4).epsilon(1e-9));
    prev_finish = start + 4;
  }
  CHECK(r.keys_consumed_bytes == 50 * 30);
  CHECK(r.dealer_idle_s == 0);
}

TEST_CASE("queue conserves keys and never overdraws the pool") {
  QueueConfig q;
  q.stream = {3, 5.0, 300};
  q.pool.capacity_bytes = 100;
  q.pool.link_Bps = 4;
  q.key_demand_bytes = 35;
  q.service_s = 3;
  q.online_workers = 2;
  const QueueResult r = run_queue_sim(q);
  double demand = 0;
  for (const auto& j : r.jobs) {
    demand += j.key_demand_bytes;
    CHECK(j.start_s >= j.arrival_s);
    CHECK(j.finish_s >= j.start_s);
  }
  CHECK(r.keys_consumed_bytes == doctest::Approx(demand));
  CHECK(r.min_pool_level_bytes >= 0);
  // Start full: consumed <= capacity + generated.
  CHECK(r.keys_consumed_bytes <= 100 + r.keys_generated_bytes + 1e-6);
  for (const auto& e : r.log) {
    CHECK(e.pool_level_bytes >= 0);
    CHECK(e.pool_level_bytes <= 100 + 1e-9);
  }
}

TEST_CASE("dealer idles only while the pool is full") {
  QueueConfig q;
  q.stream = {5, 50.0, 40};
  q.pool.capacity_bytes = 10;
  q.pool.link_Bps = 1;
  q.key_demand_bytes = 5;
  q.service_s = 1;
  const QueueResult r = run_queue_sim(q);
  // Generated bytes run at the full link rate except while full.
  const double horizon = r.jobs.back().finish_s;
  CHECK(r.keys_generated_bytes + r.dealer_idle_s * 1.0 == doctest::Approx(horizon).epsilon(1e-9));
  int full_events = 0;
  for (const auto& e : r.log) full_events += e.kind == EventKind::kPoolFull;
  CHECK(full_events > 0);
}

TEST_CASE("same seed gives an identical event log") {
  QueueConfig q;
  q.stream = {11, 10.0, 200};
  q.pool.capacity_bytes = 1e3;
  q.pool.link_Bps = 10;
  q.key_demand_bytes = 90;
  q.service_s = 8;
  const QueueResult a = run_queue_sim(q), b = run_queue_sim(q);
  CHECK(a.log == b.log);
  std::ostringstream sa, sb;
  write_event_log(sa, a);
  write_event_log(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("time_s,kind,job_id,pool_level_bytes\n", 0) == 0);
  q.stream.seed = 12;
  CHECK(run_queue_sim(q).log != a.log);
}

TEST_CASE("starvation is reported explicitly") {
  QueueConfig q;
  q.stream = {1, 10.0, 5};
  q.pool.capacity_bytes = 10;
  q.pool.link_Bps = 1;
  q.key_demand_bytes = 11;
  CHECK_THROWS_AS(run_queue_sim(q), InfeasibleError);

  // Fits once but never refills.
  q.key_demand_bytes = 6;
  q.pool.link_Bps = 0;
  CHECK_THROWS_AS(run_queue_sim(q), InfeasibleError);

  q.pool.link_Bps = 1;
  q.online_workers = 0;
  CHECK_THROWS_AS(run_queue_sim(q), ConfigError);
}

TEST_CASE("zero-demand jobs only queue for workers") {
  const CostProfile p = builtin_profile("resnet20", Scheme::kA2b, 1, shipped());
  KeyPool pool;
  const QueueConfig q = make_queue_config(p, preset("wan_f"), {9, 30.0, 100}, pool);
  CHECK(q.key_demand_bytes == 0);
  CHECK(q.pool.link_Bps == preset("wan_f").bandwidth_Bps);
  const QueueResult r = run_queue_sim(q);
  CHECK(r.keys_consumed_bytes == 0);
  CHECK(r.mean_wait_s() < q.service_s);
}

TEST_CASE("waits stay bounded when the system is stable") {
  // Arrival rate 0.1/s, one worker at 5 s per job, refill covers 2x demand.
  QueueConfig q;
  q.stream = {21, 10.0, 2000};
  q.pool.capacity_bytes = 100;
  q.pool.link_Bps = 2;
  q.key_demand_bytes = 10;
  q.service_s = 5;
  const QueueResult r = run_queue_sim(q);
  double late_max = 0;
  for (size_t i = 1000; i < r.jobs.size(); ++i) late_max = std::max(late_max, r.jobs[i].wait_s());
  CHECK(late_max < 20 * q.service_s);
}

TEST_CASE("key pool refill rate takes the tightest source") {
  KeyPool p;
  p.link_Bps = 7e7;
  CHECK(p.refill_Bps() == 7e7);
  p.dealer_gen_Bps = 5e7;
  CHECK(p.refill_Bps() == 5e7);
  p.disk_read_Bps = 1e7;
  CHECK(p.refill_Bps() == 1e7);
}
