// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppml/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <sstream>

#include "ppml/error.hpp"

namespace ppml {

namespace {

constexpr std::pair<PhaseKind, std::string_view> kPhaseNames[] = {
    {PhaseKind::kGpuComputeHeavy, "gpu_compute_heavy"},
    {PhaseKind::kGpuComputeLight, "gpu_compute_light"},
    {PhaseKind::kCpuCompute, "cpu_compute"},
    {PhaseKind::kCommActive, "comm_active"},
    {PhaseKind::kCommWaitIdle, "comm_wait_idle"},
    {PhaseKind::kDiskRead, "disk_read"},
    {PhaseKind::kOfflineKeygen, "offline_keygen"},
    {PhaseKind::kOfflineTransfer, "offline_transfer"},
};

void push(PhaseTimeline& t, PhaseKind kind, const std::string& layer, double duration,
          double bytes) {
  if (duration == 0 && bytes == 0) return;
  t.phases.push_back({kind, layer, duration, bytes});
}

}  // namespace

std::string_view to_string(PhaseKind k) {
  for (const auto& [kind, name] : kPhaseNames)
    if (kind == k) return name;
  return "?";
}

PhaseKind parse_phase_kind(std::string_view name) {
  for (const auto& [kind, n] : kPhaseNames)
    if (n == name) return kind;
  throw ConfigError("unknown phase kind '" + std::string(name) + "'");
}

std::vector<PhaseKind> all_phase_kinds() {
  std::vector<PhaseKind> out;
  for (const auto& [kind, name] : kPhaseNames) out.push_back(kind);
  return out;
}

double PhaseTimeline::total_latency_s() const {
  double s = 0;
  for (const auto& p : phases) s += p.duration_s;
  return s;
}

double PhaseTimeline::duration(PhaseKind k) const {
  double s = 0;
  for (const auto& p : phases)
    if (p.kind == k) s += p.duration_s;
  return s;
}

double PhaseTimeline::bytes(PhaseKind k) const {
  double s = 0;
  for (const auto& p : phases)
    if (p.kind == k) s += p.bytes;
  return s;
}

PhaseTimeline run_inference(const CostProfile& p, const NetworkConfig& cfg,
                            const InferenceOptions& opts) {
  if (opts.disk_read_Bps && !(*opts.disk_read_Bps > 0))
    throw ConfigError("disk read bandwidth must be positive");
  PhaseTimeline t;
  if (p.per_layer.empty()) return t;
  if (opts.include_offline) {
    push(t, PhaseKind::kOfflineKeygen, "dealer", p.offline_compute_s(), 0);
    push(t, PhaseKind::kOfflineTransfer, "dealer", p.totals.offline_bytes / cfg.bandwidth_Bps,
         p.totals.offline_bytes);
  }
  const PhaseKind compute =
      p.scheme == Scheme::kFhe ? PhaseKind::kGpuComputeHeavy : PhaseKind::kGpuComputeLight;
  const bool disk = opts.disk_read_Bps && p.scheme == Scheme::kFss;
  for (const auto& l : p.per_layer) {
    if (disk) push(t, PhaseKind::kDiskRead, l.layer, l.key_bytes / *opts.disk_read_Bps, l.key_bytes);
    push(t, compute, l.layer, l.online_compute_s / p.compute_speedup, 0);
    push(t, PhaseKind::kCommActive, l.layer, l.online_bytes / cfg.bandwidth_Bps, l.online_bytes);
    push(t, PhaseKind::kCommWaitIdle, l.layer, l.online_rounds * cfg.rtt_s, 0);
  }
  return t;
}

double throughput(const CostProfile& p, const NetworkConfig& cfg, const InferenceOptions& opts) {
  const double lat = run_inference(p, cfg, opts).total_latency_s();
  if (!(lat > 0)) throw ConfigError("throughput of a zero-latency profile is undefined");
  return static_cast<double>(p.batch) / lat;
}

double batching_gain(std::string_view model, Scheme scheme, const NetworkConfig& cfg,
                     const Calibration& cal, std::int64_t batch, const InferenceOptions& opts) {
  const CostProfile one = builtin_profile(model, scheme, 1, cal);
  const CostProfile many = builtin_profile(model, scheme, batch, cal);
  return throughput(many, cfg, opts) / throughput(one, cfg, opts);
}

CollapseRates effective_throughput_collapse(const CostProfile& p, const NetworkConfig& cfg,
                                            std::optional<double> disk_read_Bps) {
  InferenceOptions online;
  online.disk_read_Bps = disk_read_Bps;
  InferenceOptions full = online;
  full.include_offline = true;
  return {throughput(p, cfg, online), throughput(p, cfg, full)};
}

// ---------------------------------------------------------------------------

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::kArrival:
      return "arrival";
    case EventKind::kStart:
      return "start";
    case EventKind::kFinish:
      return "finish";
    case EventKind::kPoolFull:
      return "pool_full";
  }
  return "?";
}

double KeyPool::refill_Bps() const {
  double r = link_Bps > 0 ? link_Bps : 0.0;
  if (dealer_gen_Bps > 0) r = std::min(r, dealer_gen_Bps);
  if (disk_read_Bps) r = std::min(r, std::max(*disk_read_Bps, 0.0));
  return r;
}

double QueueResult::mean_wait_s() const {
  if (jobs.empty()) return 0;
  double s = 0;
  for (const auto& j : jobs) s += j.wait_s();
  return s / static_cast<double>(jobs.size());
}

double QueueResult::max_wait_s() const {
  double m = 0;
  for (const auto& j : jobs) m = std::max(m, j.wait_s());
  return m;
}

double QueueResult::mean_response_s() const {
  if (jobs.empty()) return 0;
  double s = 0;
  for (const auto& j : jobs) s += j.response_s();
  return s / static_cast<double>(jobs.size());
}

std::vector<double> poisson_arrivals(const JobStream& s) {
  if (s.n_jobs < 0) throw ConfigError("job count must be >= 0");
  if (!(s.mean_interarrival_s > 0)) throw ConfigError("mean inter-arrival time must be positive");
  std::mt19937_64 rng(s.seed);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(s.n_jobs));
  double t = 0;
  for (int i = 0; i < s.n_jobs; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    t += -s.mean_interarrival_s * std::log1p(-u);
    out.push_back(t);
  }
  return out;
}

namespace {

class QueueSim {
 public:
  explicit QueueSim(const QueueConfig& q) : q_(q), rate_(q.pool.refill_Bps()) {
    const KeyPool& pool = q.pool;
    if (!(pool.capacity_bytes >= 0)) throw ConfigError("pool capacity must be >= 0");
    if (q.online_workers < 1) throw ConfigError("online_workers must be >= 1");
    if (!(q.service_s >= 0)) throw ConfigError("service time must be >= 0");
    if (q.key_demand_bytes > pool.capacity_bytes) {
      std::ostringstream os;
      os << "permanent starvation: per-job key demand " << q.key_demand_bytes
         << " B exceeds pool capacity " << pool.capacity_bytes << " B";
      throw InfeasibleError(os.str());
    }
    level_ = pool.initial_level_bytes < 0 ? pool.capacity_bytes
                                          : std::min(pool.initial_level_bytes, pool.capacity_bytes);
    full_ = level_ >= pool.capacity_bytes;
  }

  QueueResult run() {
    const std::vector<double> arrivals = poisson_arrivals(q_.stream);
    const size_t n = arrivals.size();
    r_.jobs.resize(n);
    r_.min_pool_level_bytes = level_;
    size_t next_arrival = 0, finished = 0;
    std::deque<int> waiting;
    using Fin = std::pair<double, int>;
    std::priority_queue<Fin, std::vector<Fin>, std::greater<>> running;
    const double demand = q_.key_demand_bytes;
    const double inf = std::numeric_limits<double>::infinity();

    while (finished < n) {
      // Start as many head-of-line jobs as workers and keys allow.
      while (!waiting.empty() && static_cast<int>(running.size()) < q_.online_workers &&
             level_ >= demand * (1 - 1e-12)) {
        const int id = waiting.front();
        waiting.pop_front();
        level_ = std::max(0.0, level_ - demand);
        full_ = false;
        r_.keys_consumed_bytes += demand;
        r_.min_pool_level_bytes = std::min(r_.min_pool_level_bytes, level_);
        Job& j = r_.jobs[static_cast<size_t>(id)];
        j.start_s = now_;
        j.finish_s = now_ + q_.service_s;
        running.push({j.finish_s, id});
        log(EventKind::kStart, id);
      }
      const double t_arr = next_arrival < n ? arrivals[next_arrival] : inf;
      const double t_fin = running.empty() ? inf : running.top().first;
      double t_ready = inf;
      if (!waiting.empty() && static_cast<int>(running.size()) < q_.online_workers) {
        if (rate_ > 0) t_ready = now_ + (demand - level_) / rate_;
      }
      const double t_next = std::min({t_arr, t_fin, t_ready});
      if (t_next == inf) {
        std::ostringstream os;
        os << "permanent starvation: " << waiting.size()
           << " job(s) wait for keys and the pool has no refill source";
        throw InfeasibleError(os.str());
      }
      advance(t_next);
      while (!running.empty() && running.top().first <= now_) {
        log(EventKind::kFinish, running.top().second);
        running.pop();
        ++finished;
      }
      while (next_arrival < n && arrivals[next_arrival] <= now_) {
        const int id = static_cast<int>(next_arrival);
        Job& j = r_.jobs[next_arrival];
        j.id = id;
        j.model = q_.model;
        j.batch = q_.batch;
        j.arrival_s = arrivals[next_arrival];
        j.key_demand_bytes = demand;
        waiting.push_back(id);
        log(EventKind::kArrival, id);
        ++next_arrival;
      }
    }
    return std::move(r_);
  }

 private:
  // Moves the clock, refilling the pool at the dealer rate up to capacity.
  void advance(double t) {
    const double dt = t - now_;
    if (dt > 0 && rate_ > 0) {
      const double room = q_.pool.capacity_bytes - level_;
      const double fill_time = room / rate_;
      if (dt >= fill_time) {
        level_ = q_.pool.capacity_bytes;
        r_.keys_generated_bytes += room;
        r_.dealer_idle_s += dt - fill_time;
        if (!full_) {
          full_ = true;
          r_.log.push_back({now_ + fill_time, EventKind::kPoolFull, -1, level_});
        }
      } else {
        level_ += rate_ * dt;
        r_.keys_generated_bytes += rate_ * dt;
      }
    } else if (dt > 0 && full_) {
      r_.dealer_idle_s += dt;
    }
    now_ = std::max(now_, t);
  }

  void log(EventKind k, int id) { r_.log.push_back({now_, k, id, level_}); }

  const QueueConfig& q_;
  const double rate_;
  double now_ = 0;
  double level_ = 0;
  bool full_ = false;
  QueueResult r_;
};

}  // namespace

QueueResult run_queue_sim(const QueueConfig& q) { return QueueSim(q).run(); }

QueueConfig make_queue_config(const CostProfile& p, const NetworkConfig& cfg, JobStream s,
                              KeyPool pool, int online_workers) {
  QueueConfig q;
  q.stream = s;
  q.model = p.model;
  q.batch = p.batch;
  if (!(pool.link_Bps > 0)) pool.link_Bps = cfg.bandwidth_Bps;
  q.pool = pool;
  q.online_workers = online_workers;
  q.service_s = online_latency(p, cfg);
  if (p.scheme == Scheme::kFss && pool.disk_read_Bps)
    q.service_s += p.totals.key_bytes / *pool.disk_read_Bps;
  q.key_demand_bytes = p.scheme == Scheme::kFss ? p.totals.key_bytes : 0.0;
  return q;
}

void write_event_log(std::ostream& os, const QueueResult& r) {
  os << "time_s,kind,job_id,pool_level_bytes\n";
  os.precision(17);
  for (const auto& e : r.log)
    os << e.time_s << ',' << to_string(e.kind) << ',' << e.job_id << ',' << e.pool_level_bytes
       << '\n';
}

}  // namespace ppml
