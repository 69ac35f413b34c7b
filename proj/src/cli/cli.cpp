// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ppml/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ppml/config.hpp"
#include "ppml/costkit.hpp"
#include "ppml/error.hpp"
#include "ppml/mpc/fss.hpp"
#include "ppml/mpc/kernels.hpp"
#include "ppml/mpc/serialize.hpp"
#include "ppml/projector.hpp"
#include "ppml/report.hpp"
#include "ppml/simkit.hpp"
#include "ppml/workload.hpp"

namespace ppml {

namespace {

constexpr double kGB = 1e9;

// Values given on the command line; each overrides the scenario when its
// option was actually passed.
struct Flags {
  std::string scenario;
  std::string model, model_file, scheme, net, calibration;
  std::int64_t seq_len = 0, batch = 0;
  double rtt_s = 0, bandwidth_Bps = 0;
  bool include_offline = false, online_only = false, with_max = false, no_max = false;
  std::uint64_t seed = 1;
  double capacity_GB = 0, initial_GB = 0, link_GBps = 0, dealer_GBps = 0, disk_GBps = 0;
  double interarrival_s = 0, storage_TB = 0;
  int n_jobs = 0, workers = 0;
  std::string format = "md";
  std::string report_dir;
  bool all_nets = false, per_layer = false;
  std::vector<double> sweep_GB;
  std::vector<std::int64_t> lengths{16, 32, 64, 128, 256, 512};
  std::vector<std::string> schemes;
  std::vector<double> xs{1, 2, 5, 10, 20, 50, 100};
  std::string observations, anchors;
  int domain_bits = 10, trials = 100;
};

struct Options {
  std::map<std::string, CLI::Option*> given;
  bool has(const std::string& name) const {
    auto it = given.find(name);
    return it != given.end() && it->second->count() > 0;
  }
};

void add_common(CLI::App* sub, Flags& f, Options& o) {
  auto add = [&](const std::string& name, auto& var, const std::string& help) {
    return o.given[name + "@" + sub->get_name()] = sub->add_option(name, var, help);
  };
  auto flag = [&](const std::string& name, bool& var, const std::string& help) {
    o.given[name + "@" + sub->get_name()] = sub->add_flag(name, var, help);
  };
  add("--scenario", f.scenario, "scenario YAML file");
  add("--model", f.model, "builtin model: bert_tiny, bert_base, resnet20, resnet50");
  add("--model-file", f.model_file, "model graph text file");
  add("--seq-len", f.seq_len, "transformer sequence length");
  add("--batch", f.batch, "batch size");
  add("--scheme", f.scheme, "a2b, fss or fhe");
  add("--net", f.net, "network preset: wan_s, wan_m, wan_f, lan_s, lan_f");
  add("--rtt", f.rtt_s, "custom network round-trip time, s");
  add("--bandwidth", f.bandwidth_Bps, "custom network bandwidth, bytes/s");
  flag("--include-offline", f.include_offline, "count dealer phases");
  flag("--online-only", f.online_only, "leave dealer phases out");
  flag("--with-max", f.with_max, "insert a max before every softmax");
  flag("--no-max", f.no_max, "omit the max before softmax");
  add("--calibration", f.calibration, "calibration YAML file");
  add("--seed", f.seed, "random seed");
  add("--storage-TB", f.storage_TB, "provisioned key storage, TB");
  add("--disk-GBps", f.disk_GBps, "keys streamed from disk at this rate, GB/s");
  add("--format", f.format, "stdout format: md, csv or json")
      ->check(CLI::IsMember({"md", "csv", "json"}));
  add("--report-dir", f.report_dir, "directory for report files (default $PPML_REPORT_DIR)");
}

struct Context {
  Scenario sc;
  CalibrationBundle bundle;
  std::string scenario_label = "(none)";
  std::string calibration_path;
};

Context resolve(const Flags& f, const Options& o, const std::string& cmd) {
  auto has = [&](const char* name) { return o.has(std::string(name) + "@" + cmd); };
  Context c;
  if (has("--scenario")) {
    c.sc = load_scenario_file(f.scenario);
    c.scenario_label = f.scenario;
  }
  Scenario& sc = c.sc;
  if (has("--model")) {
    sc.model = f.model;
    sc.model_file.clear();
  }
  if (has("--model-file")) sc.model_file = f.model_file;
  if (has("--seq-len")) sc.seq_len = f.seq_len;
  if (has("--batch")) sc.batch = f.batch;
  if (sc.batch < 1) throw ConfigError("--batch must be >= 1");
  if (has("--scheme")) sc.scheme = parse_scheme(f.scheme);
  if (has("--include-offline") && has("--online-only"))
    throw ConfigError("--include-offline and --online-only are exclusive");
  if (has("--include-offline")) sc.include_offline = true;
  if (has("--online-only")) sc.include_offline = false;
  if (has("--with-max") && has("--no-max")) throw ConfigError("--with-max and --no-max are exclusive");
  if (has("--with-max")) sc.include_max = true;
  if (has("--no-max")) sc.include_max = false;
  if (has("--net") && (has("--rtt") || has("--bandwidth")))
    throw ConfigError("--net and --rtt/--bandwidth are exclusive");
  if (has("--net")) sc.net = preset(f.net);
  if (has("--rtt") != has("--bandwidth")) throw ConfigError("--rtt needs --bandwidth and vice versa");
  if (has("--rtt")) sc.net = make_network("custom", f.rtt_s, f.bandwidth_Bps);
  if (has("--seed")) sc.jobs.seed = f.seed;
  if (has("--storage-TB")) {
    if (!(f.storage_TB >= 0)) throw ConfigError("--storage-TB must be >= 0");
    sc.storage_TB = f.storage_TB;
  }
  if (has("--disk-GBps")) {
    if (!(f.disk_GBps > 0)) throw ConfigError("--disk-GBps must be positive");
    sc.pool.disk_read_Bps = f.disk_GBps * kGB;
  }
  if (has("--capacity-GB")) sc.pool.capacity_bytes = f.capacity_GB * kGB, sc.pool_given = true;
  if (has("--initial-GB")) sc.pool.initial_level_bytes = f.initial_GB * kGB;
  if (has("--link-GBps")) sc.pool.link_Bps = f.link_GBps * kGB;
  if (has("--dealer-GBps")) sc.pool.dealer_gen_Bps = f.dealer_GBps * kGB;
  if (has("--interarrival")) sc.jobs.mean_interarrival_s = f.interarrival_s;
  if (has("--jobs")) sc.jobs.n_jobs = f.n_jobs;
  if (has("--workers")) sc.online_workers = f.workers;

  if (has("--calibration")) sc.calibration = f.calibration;
  c.calibration_path = sc.calibration.empty() ? default_calibration_path() : sc.calibration;
  c.bundle = load_calibration_file(c.calibration_path);
  return c;
}

std::string model_label(const Scenario& sc) {
  return sc.model_file.empty() ? sc.model : sc.model_file;
}

CostProfile profile_for(const Context& c, Scheme s, std::int64_t batch) {
  const Scenario& sc = c.sc;
  if (!sc.model_file.empty()) return make_profile(load_model_file(sc.model_file, batch), s, c.bundle.cal);
  return builtin_profile(sc.model, s, batch, c.bundle.cal, sc.seq_len, sc.include_max);
}

InferenceOptions inference_options(const Scenario& sc) {
  InferenceOptions o;
  o.include_offline = sc.include_offline;
  o.disk_read_Bps = sc.pool.disk_read_Bps;
  return o;
}

std::string num(double v) {
  std::ostringstream ss;
  ss.precision(10);
  ss << v;
  return ss.str();
}

Report start_report(const std::string& cmd, const Context& c) {
  Report r;
  r.command = cmd;
  r.meta["generator"] = "ppml-sim";
  r.meta["seed"] = std::to_string(c.sc.jobs.seed);
  r.meta["calibration_sha256"] = c.bundle.cal.source_hash;
  r.meta["calibration"] = c.calibration_path;
  r.meta["scenario"] = c.scenario_label;
  r.meta["model"] = model_label(c.sc);
  r.meta["scheme"] = std::string(to_string(c.sc.scheme));
  r.meta["batch"] = std::to_string(c.sc.batch);
  r.meta["seq_len"] = std::to_string(c.sc.seq_len);
  r.meta["network"] = c.sc.net.name + " (rtt " + num(c.sc.net.rtt_s) + " s, " +
                      num(c.sc.net.bandwidth_Bps) + " B/s)";
  r.meta["include_offline"] = c.sc.include_offline ? "true" : "false";
  return r;
}

std::vector<NetworkConfig> networks(const Flags& f, const Scenario& sc) {
  if (!f.all_nets) return {sc.net};
  std::vector<NetworkConfig> out;
  for (const auto& n : preset_names()) out.push_back(preset(n));
  return out;
}

// ---------------------------------------------------------------------------
// Commands

Report cmd_latency(const Flags& f, const Context& c) {
  Report r = start_report("latency", c);
  const CostProfile p = profile_for(c, c.sc.scheme, c.sc.batch);
  Table& t = r.table("latency", "Latency per query",
                     {"model", "scheme", "network", "batch", "online_s", "offline_s",
                      "online_plus_offline_s", "reported_s", "per_sample_s", "rounds", "online_GB",
                      "offline_GB", "key_GB", "peak_gpu_GB", "peak_cpu_GB"});
  for (const auto& net : networks(f, c.sc)) {
    const double on = online_latency(p, net), off = offline_latency(p, net);
    const double reported = c.sc.include_offline ? on + off : on;
    t.add({model_label(c.sc), std::string(to_string(p.scheme)), net.name, p.batch, on, off, on + off,
           reported, reported / static_cast<double>(p.batch), p.totals.online_rounds,
           p.totals.online_bytes / kGB, p.totals.offline_bytes / kGB, p.totals.key_bytes / kGB,
           p.peak_gpu_mem_bytes / kGB, p.peak_cpu_mem_bytes / kGB});
  }
  const PhaseTimeline tl = run_inference(p, c.sc.net, inference_options(c.sc));
  Table& ph = r.table("phases", "Phase breakdown on " + c.sc.net.name,
                      {"phase", "duration_s", "share", "bytes"});
  const double total = tl.total_latency_s();
  for (PhaseKind k : all_phase_kinds())
    ph.add({std::string(to_string(k)), tl.duration(k), total > 0 ? tl.duration(k) / total : 0.0,
            tl.bytes(k)});
  ph.add({std::string("total"), total, 1.0, 0.0});
  if (f.per_layer) {
    Table& l = r.table("layers", "Per-layer costs",
                       {"layer", "rounds", "online_bytes", "offline_bytes", "online_compute_s",
                        "offline_compute_s", "key_bytes"});
    l.detail = true;
    for (const auto& lc : p.per_layer)
      l.add({lc.layer, lc.online_rounds, lc.online_bytes, lc.offline_bytes,
             lc.online_compute_s / p.compute_speedup, lc.offline_compute_s / p.compute_speedup,
             lc.key_bytes});
  }
  return r;
}

Report cmd_throughput(const Flags& f, const Context& c) {
  Report r = start_report("throughput", c);
  const CostProfile p = profile_for(c, c.sc.scheme, c.sc.batch);
  const CostProfile one = profile_for(c, c.sc.scheme, 1);
  InferenceOptions online = inference_options(c.sc), full = online;
  online.include_offline = false;
  full.include_offline = true;
  Table& t = r.table("throughput", "Throughput",
                     {"model", "scheme", "network", "batch", "online_samples_per_s",
                      "online_plus_offline_samples_per_s", "gain_online", "gain_online_plus_offline"});
  for (const auto& net : networks(f, c.sc)) {
    const double a = throughput(p, net, online), b = throughput(p, net, full);
    t.add({model_label(c.sc), std::string(to_string(p.scheme)), net.name, p.batch, a, b,
           a / throughput(one, net, online), b / throughput(one, net, full)});
  }
  r.notes.push_back("gains are relative to batch 1 on the same network");
  return r;
}

Report cmd_energy(const Flags&, const Context& c) {
  Report r = start_report("energy", c);
  const CostProfile p = profile_for(c, c.sc.scheme, c.sc.batch);
  const PhaseTimeline tl = run_inference(p, c.sc.net, inference_options(c.sc));
  const EnergyBreakdown e = energy(tl, c.sc.power, c.bundle.power_map, link_tier(c.sc.net));
  r.meta["power_nic_count"] = std::to_string(c.sc.power.nic_count);
  Table& t = r.table("energy", "Energy by phase and component (J, one party)",
                     {"phase", "gpu_J", "cpu_J", "mem_io_J", "nic_J", "total_J"});
  for (PhaseKind k : all_phase_kinds()) {
    auto it = e.joules.find(k);
    std::array<double, kComponentCount> j{};
    if (it != e.joules.end()) j = it->second;
    t.add({std::string(to_string(k)), j[0], j[1], j[2], j[3], e.phase(k)});
  }
  t.add({std::string("total"), e.component(Component::kGpu), e.component(Component::kCpu),
         e.component(Component::kMemIo), e.component(Component::kNic), e.total()});
  const double bytes = p.totals.online_bytes + (c.sc.include_offline ? p.totals.offline_bytes : 0);
  Table& s = r.table("summary", "Summary",
                     {"latency_s", "total_J", "per_sample_J", "idle_wait_J", "idle_wait_share",
                      "wan_transit_J"});
  s.add({tl.total_latency_s(), e.total(), e.total() / static_cast<double>(p.batch), e.idle_wait_j,
         e.idle_wait_share(), wan_transit_energy(bytes, c.sc.prices)});
  r.notes.push_back("wan_transit_J is the estimated network-side energy of the bytes moved; it is "
                    "not part of the machine total");
  return r;
}

Report cmd_cost(const Flags&, const Context& c) {
  Report r = start_report("cost", c);
  const CostProfile p = profile_for(c, c.sc.scheme, c.sc.batch);
  const PhaseTimeline tl = run_inference(p, c.sc.net, inference_options(c.sc));
  const Traffic traffic{p.totals.online_bytes, c.sc.include_offline ? p.totals.offline_bytes : 0};
  const CostBreakdown m = money(tl, traffic, c.sc.net, c.sc.prices, c.sc.storage_TB);
  const CostBreakdown per = m.per_item(static_cast<double>(p.batch));
  r.meta["storage_TB"] = num(c.sc.storage_TB);
  Table& t = r.table("cost", "Cost (USD, one party)", {"item", "usd", "usd_per_sample"});
  t.add({std::string("instance"), m.instance, per.instance});
  t.add({std::string("storage"), m.storage, per.storage});
  t.add({std::string("fast_port"), m.port, per.port});
  t.add({std::string("transfer_online"), m.transfer_online, per.transfer_online});
  t.add({std::string("transfer_offline"), m.transfer_offline, per.transfer_offline});
  t.add({std::string("total"), m.total(), per.total()});
  r.notes.push_back("latency " + num(tl.total_latency_s()) + " s; fast port billed: " +
                    (uses_fast_port(c.sc.net) ? "yes" : "no"));
  return r;
}

std::vector<Cell> queue_summary(double capacity, const QueueConfig& q, const QueueResult& res) {
  return {capacity / kGB, std::string("ok"), static_cast<std::int64_t>(res.jobs.size()),
          q.service_s, q.key_demand_bytes / kGB, res.mean_wait_s(), res.max_wait_s(),
          res.mean_response_s(), res.dealer_idle_s, res.min_pool_level_bytes / kGB,
          res.keys_consumed_bytes / kGB};
}

const std::vector<std::string> kQueueColumns{
    "capacity_GB",  "status",     "jobs",          "service_s",    "demand_GB_per_job", "mean_wait_s",
    "max_wait_s",   "mean_response_s", "dealer_idle_s", "min_pool_GB", "consumed_GB"};

Report cmd_queue(const Flags& f, const Context& c) {
  Report r = start_report("queue-sim", c);
  const CostProfile p = profile_for(c, c.sc.scheme, c.sc.batch);
  const QueueConfig q = make_queue_config(p, c.sc.net, c.sc.jobs, c.sc.pool, c.sc.online_workers);
  r.meta["mean_interarrival_s"] = num(q.stream.mean_interarrival_s);
  r.meta["n_jobs"] = std::to_string(q.stream.n_jobs);
  r.meta["online_workers"] = std::to_string(q.online_workers);
  r.meta["refill_Bps"] = num(q.pool.refill_Bps());
  Table& t = r.table("summary", "Queue summary", kQueueColumns);

  if (!f.sweep_GB.empty()) {
    // One row per pool size; starvation is a row, not an error.
    for (double gb : f.sweep_GB) {
      QueueConfig qc = q;
      qc.pool.capacity_bytes = gb * kGB;
      try {
        t.add(queue_summary(qc.pool.capacity_bytes, qc, run_queue_sim(qc)));
      } catch (const InfeasibleError& e) {
        t.add({gb, std::string("starved"), std::int64_t{0}, q.service_s, q.key_demand_bytes / kGB,
               0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
        r.notes.push_back(num(gb) + " GB: " + e.what());
      }
    }
    return r;
  }

  const QueueResult res = run_queue_sim(q);
  t.add(queue_summary(q.pool.capacity_bytes, q, res));
  Table& jobs = r.table("jobs", "Jobs",
                        {"job", "arrival_s", "start_s", "finish_s", "wait_s", "response_s"});
  jobs.detail = true;
  for (const auto& j : res.jobs)
    jobs.add({std::int64_t{j.id}, j.arrival_s, j.start_s, j.finish_s, j.wait_s(), j.response_s()});
  Table& ev = r.table("events", "Event log", {"time_s", "kind", "job_id", "pool_level_bytes"});
  ev.detail = true;
  for (const auto& e : res.log)
    ev.add({e.time_s, std::string(to_string(e.kind)), std::int64_t{e.job_id}, e.pool_level_bytes});
  const CollapseRates cr = effective_throughput_collapse(p, c.sc.net, c.sc.pool.disk_read_Bps);
  Table& col = r.table("collapse", "Sustained rates",
                       {"online_qps", "online_plus_offline_qps", "ratio"});
  col.add({cr.online_qps, cr.online_plus_offline_qps, cr.ratio()});
  return r;
}

Report cmd_context(const Flags& f, const Context& c) {
  Report r = start_report("context-sweep", c);
  std::vector<Scheme> schemes;
  for (const auto& s : f.schemes) schemes.push_back(parse_scheme(s));
  if (schemes.empty()) schemes = {Scheme::kA2b, Scheme::kFss, Scheme::kFhe};
  ContextOptions opts;
  opts.model = c.sc.model;
  opts.batch = c.sc.batch;
  opts.include_max = c.sc.include_max;
  opts.view.include_offline = c.sc.include_offline;
  Table& t = r.table("context", "Latency against sequence length (normalized at 128)",
                     {"seq_len", "scheme", "latency_s", "normalized"});
  for (Scheme s : schemes)
    for (const auto& pt : context_sweep(f.lengths, s, c.sc.net, c.bundle.cal, opts))
      t.add({static_cast<std::int64_t>(pt.x), std::string(to_string(s)), pt.value, pt.normalized});
  return r;
}

Report cmd_hw(const Flags& f, const Context& c) {
  Report r = start_report("hw-sweep", c);
  const LatencyView mpc_view{c.sc.include_offline, true};
  const std::vector<Contender> cs{
      {"fhe", profile_for(c, Scheme::kFhe, 1), {false, true}},
      {"a2b", profile_for(c, Scheme::kA2b, c.sc.batch), mpc_view},
      {"fss", profile_for(c, Scheme::kFss, c.sc.batch), mpc_view}};
  std::vector<std::string> cols{"x"};
  for (const auto& k : cs) {
    cols.push_back(k.label + "_s");
    cols.push_back(k.label + "_per_x");
    cols.push_back(k.label + "_global");
  }
  Table& t = r.table("hw", "Per-sample latency against compute speedup", cols);
  for (const auto& row : hw_sweep(cs, f.xs, c.sc.net)) {
    std::vector<Cell> cells{row.x};
    for (size_t i = 0; i < cs.size(); ++i) {
      cells.push_back(row.latency[i]);
      cells.push_back(row.per_x[i]);
      cells.push_back(row.global[i]);
    }
    t.add(std::move(cells));
  }
  const double lo = *std::min_element(f.xs.begin(), f.xs.end());
  const double hi = *std::max_element(f.xs.begin(), f.xs.end());
  Table& x = r.table("crossover", "Crossovers", {"pair", "crossover_x", "gap_at_lo_s", "gap_at_hi_s"});
  for (size_t i = 1; i < cs.size(); ++i) {
    const Crossover cr = crossover(cs[0], cs[i], c.sc.net, lo, hi);
    x.add({cs[0].label + " vs " + cs[i].label, cr.x ? Cell{*cr.x} : Cell{std::string("none in range")},
           cr.gap_at_lo, cr.gap_at_hi});
  }
  return r;
}

std::vector<Observation> read_observations(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::vector<std::string> header;
  std::vector<Observation> obs;
  int lineno = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell.erase(0, cell.find_first_not_of(" \t\r"));
      cell.erase(cell.find_last_not_of(" \t\r") + 1);
      out.push_back(cell);
    }
    return out;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const auto cells = split(line);
    const std::string where = path + ":" + std::to_string(lineno) + ": ";
    if (header.empty()) {
      header = cells;
      const bool by_name = header == std::vector<std::string>{"network", "latency_s"};
      const bool explicit_net =
          header == std::vector<std::string>{"rtt_s", "bandwidth_Bps", "latency_s"};
      if (!by_name && !explicit_net)
        throw ConfigError(where + "header must be 'network,latency_s' or "
                                  "'rtt_s,bandwidth_Bps,latency_s'");
      continue;
    }
    if (cells.size() != header.size()) throw ConfigError(where + "wrong number of fields");
    try {
      Observation o;
      if (header.size() == 2) {
        o.net = preset(cells[0]);
        o.latency_s = std::stod(cells[1]);
      } else {
        o.net = make_network("row" + std::to_string(lineno), std::stod(cells[0]), std::stod(cells[1]));
        o.latency_s = std::stod(cells[2]);
      }
      obs.push_back(o);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    } catch (const std::logic_error&) {
      throw ConfigError(where + "not a number");
    }
  }
  return obs;
}

Report cmd_fit(const Flags& f, const Context& c, const Options& o) {
  Report r = start_report("fit-profile", c);
  std::vector<Observation> obs;
  if (o.has("--observations@fit-profile")) {
    obs = read_observations(f.observations);
    r.meta["observations"] = f.observations;
  } else {
    const std::string path = o.has("--anchors@fit-profile") ? f.anchors : default_anchors_path();
    const Anchors a = load_anchors_file(path);
    auto m = a.models.find(c.sc.model);
    if (m == a.models.end()) throw ConfigError(path + ": no anchors for model " + c.sc.model);
    auto s = m->second.mpc.find(c.sc.scheme);
    if (s == m->second.mpc.end())
      throw ConfigError(path + ": no " + std::string(to_string(c.sc.scheme)) + " anchors for " +
                        c.sc.model);
    const auto& series = c.sc.include_offline ? s->second.online_offline : s->second.online;
    for (size_t i = 0; i < a.networks.size(); ++i) obs.push_back({a.networks[i], series[i]});
    r.meta["observations"] = path;
  }
  const CalibrationFit fit = fit_profile(obs);
  Table& t = r.table("fit", "Fitted latency model",
                     {"compute_s", "rounds", "online_GB", "max_rel_residual"});
  t.add({fit.compute_s, fit.rounds, fit.online_bytes / kGB, fit.residual});
  Table& d = r.table("observations", "Observations",
                     {"network", "rtt_s", "bandwidth_Bps", "observed_s", "predicted_s", "rel_err"});
  for (const auto& ob : obs) {
    const double pred = fit.predict(ob.net);
    d.add({ob.net.name, ob.net.rtt_s, ob.net.bandwidth_Bps, ob.latency_s, pred,
           (pred - ob.latency_s) / ob.latency_s});
  }
  return r;
}

Report cmd_kernels(const Flags& f, bool& all_pass) {
  if (f.domain_bits < 1 || f.domain_bits > 20) throw ConfigError("--domain-bits must lie in [1, 20]");
  if (f.trials < 1) throw ConfigError("--trials must be >= 1");
  Report r;
  r.command = "kernels-verify";
  r.meta["generator"] = "ppml-sim";
  r.meta["seed"] = std::to_string(f.seed);
  r.meta["calibration_sha256"] = "(not used)";
  r.meta["domain_bits"] = std::to_string(f.domain_bits);
  r.meta["trials"] = std::to_string(f.trials);
  Table& t = r.table("kernels", "Kernel checks",
                     {"check", "evaluations", "failures", "rounds", "rounds_expected",
                      "bytes_per_party", "bytes_expected", "key_bytes", "key_bytes_expected", "pass"});
  const int n = f.domain_bits;
  const std::uint64_t domain = std::uint64_t{1} << n;
  mpc::Rng rng(f.seed);
  mpc::Dealer dealer(f.seed ^ 0x9e3779b97f4a7c15ULL);
  all_pass = true;
  auto row = [&](const std::string& name, std::int64_t evals, std::int64_t fails, double rounds,
                 double rounds_exp, double bytes, double bytes_exp, double key, double key_exp) {
    const bool ok = fails == 0 && rounds == rounds_exp && bytes == bytes_exp && key == key_exp;
    all_pass = all_pass && ok;
    t.add({name, evals, fails, rounds, rounds_exp, bytes, bytes_exp, key, key_exp, ok});
  };

  {
    std::int64_t fails = 0, size_fails = 0;
    for (int i = 0; i < f.trials; ++i) {
      const std::uint64_t alpha = rng.below(domain);
      const mpc::Ring beta = rng.next();
      const auto [k0, k1] = mpc::dpf_keygen(alpha, beta, n, rng.next());
      const auto a = mpc::dpf_eval_all(k0), b = mpc::dpf_eval_all(k1);
      for (std::uint64_t x = 0; x < domain; ++x) fails += a[x] + b[x] != (x == alpha ? beta : 0);
      size_fails += mpc::encode(k0).size() != mpc::dpf_key_bytes(n);
    }
    const double key = static_cast<double>(mpc::dpf_key_bytes(n));
    row("dpf point function", f.trials * static_cast<std::int64_t>(domain), fails + size_fails, 0, 0,
        0, 0, key, fss_lut_key_bytes(n, 64));
  }
  {
    std::int64_t fails = 0, size_fails = 0;
    for (int i = 0; i < f.trials; ++i) {
      const std::uint64_t alpha = rng.below(domain);
      const mpc::Ring beta = rng.next();
      const auto [k0, k1] = mpc::dcf_keygen(alpha, beta, n, rng.next());
      const auto a = mpc::dcf_eval_all(k0), b = mpc::dcf_eval_all(k1);
      for (std::uint64_t x = 0; x < domain; ++x) fails += a[x] + b[x] != (x < alpha ? beta : 0);
      size_fails += mpc::encode(k0).size() != mpc::dcf_key_bytes(n, 1);
    }
    const double key = static_cast<double>(mpc::dcf_key_bytes(n, 1));
    row("dcf comparison function", f.trials * static_cast<std::int64_t>(domain), fails + size_fails,
        0, 0, 0, 0, key, key);
  }

  constexpr std::size_t kVec = 64;
  auto random_inputs = [&] {
    std::vector<mpc::Ring> xs(kVec);
    for (auto& v : xs) v = rng.next();
    xs[0] = 0;
    xs[1] = mpc::Ring{1} << 63;
    xs[2] = (mpc::Ring{1} << 63) - 1;
    return xs;
  };
  {
    std::int64_t fails = 0;
    mpc::ChannelStats last;
    for (int i = 0; i < f.trials; ++i) {
      const auto xs = random_inputs(), ys = random_inputs();
      mpc::Session s;
      const auto z = mpc::reconstruct(
          mpc::beaver_mul(s, mpc::share_vec(xs, rng), mpc::share_vec(ys, rng), dealer.beaver_triple(kVec)));
      for (size_t j = 0; j < kVec; ++j) fails += z[j] != xs[j] * ys[j];
      last = s.stats();
    }
    const GateCost g = beaver_mul_cost(kVec, 64);
    row("beaver product (64 elems)", f.trials * static_cast<std::int64_t>(kVec), fails,
        static_cast<double>(last.rounds), g.rounds, static_cast<double>(last.bytes_sent[0]),
        g.online_bytes, static_cast<double>(mpc::beaver_record_bytes()) * kVec, g.offline_bytes);
  }
  {
    std::int64_t fails = 0;
    mpc::ChannelStats last;
    for (int i = 0; i < f.trials; ++i) {
      const auto xs = random_inputs();
      mpc::Session s;
      const auto z = mpc::reconstruct(
          mpc::a2b_compare(s, mpc::share_vec(xs, rng), dealer.compare_material(kVec)));
      for (size_t j = 0; j < kVec; ++j) fails += z[j] != (mpc::is_negative(xs[j]) ? 1u : 0u);
      last = s.stats();
    }
    const GateCost g = a2b_nonlinear_cost(kVec, 64);
    row("a2b sign comparison (64 elems)", f.trials * static_cast<std::int64_t>(kVec), fails,
        static_cast<double>(last.rounds), g.rounds, static_cast<double>(last.bytes_sent[0]),
        g.online_bytes, static_cast<double>(mpc::compare_record_bytes()) * kVec, g.offline_bytes);
  }
  {
    std::int64_t fails = 0;
    mpc::ChannelStats last;
    const int relu_trials = std::max(1, f.trials / 10);
    for (int i = 0; i < relu_trials; ++i) {
      const auto xs = random_inputs();
      mpc::Session s;
      const auto z = mpc::reconstruct(mpc::fss_relu(s, mpc::share_vec(xs, rng), dealer.relu_keys(kVec)));
      for (size_t j = 0; j < kVec; ++j) fails += z[j] != (mpc::is_negative(xs[j]) ? 0 : xs[j]);
      last = s.stats();
    }
    const FssGateCost g = fss_nonlinear_cost(kVec, 64);
    row("fss relu (64 elems)", relu_trials * static_cast<std::int64_t>(kVec), fails,
        static_cast<double>(last.rounds), g.rounds, static_cast<double>(last.bytes_sent[0]),
        g.online_bytes, static_cast<double>(mpc::relu_key_bytes() - 24) * kVec, g.key_bytes);
  }
  r.notes.push_back(all_pass ? "all kernel checks passed" : "kernel checks FAILED");
  return r;
}

// ---------------------------------------------------------------------------

void emit(const Report& r, const Flags& f, const Options& o, const std::string& cmd,
          std::ostream& out, std::ostream& err) {
  if (f.format == "json") {
    write_json(out, r);
  } else if (f.format == "csv") {
    for (size_t i = 0; i < r.tables.size(); ++i) {
      if (r.tables[i].detail) continue;
      if (i) out << '\n';
      write_csv(out, r.tables[i]);
    }
  } else {
    write_markdown(out, r, false);
  }
  std::string dir;
  if (o.has("--report-dir@" + cmd)) {
    dir = f.report_dir;
  } else if (const char* env = std::getenv("PPML_REPORT_DIR"); env && *env) {
    dir = env;
  }
  if (!dir.empty())
    for (const auto& p : write_report_files(r, dir)) err << "wrote " << p << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Latency, energy, cost and queueing simulator for private inference"};
  app.name("ppml-sim");
  app.require_subcommand(1);
  Flags f;
  Options o;
  auto sub = [&](const char* name, const char* help) {
    CLI::App* s = app.add_subcommand(name, help);
    add_common(s, f, o);
    return s;
  };
  auto opt = [&](CLI::App* s, const std::string& name, auto& var, const std::string& help) {
    CLI::Option* p = s->add_option(name, var, help);
    o.given[name + "@" + s->get_name()] = p;
    return p;
  };

  CLI::App* latency = sub("latency", "latency per query and phase breakdown");
  latency->add_flag("--all-nets", f.all_nets, "one row per network preset");
  latency->add_flag("--per-layer", f.per_layer, "add a per-layer table");
  CLI::App* thr = sub("throughput", "samples per second and batching gain");
  thr->add_flag("--all-nets", f.all_nets, "one row per network preset");
  CLI::App* en = sub("energy", "energy by phase and component");
  CLI::App* cost = sub("cost", "provider bill for one batch");
  CLI::App* queue = sub("queue-sim", "key-pool queue simulation");
  opt(queue, "--capacity-GB", f.capacity_GB, "pool capacity, GB");
  opt(queue, "--initial-GB", f.initial_GB, "initial pool level, GB (default full)");
  opt(queue, "--link-GBps", f.link_GBps, "dealer-to-server link, GB/s (default the network)");
  opt(queue, "--dealer-GBps", f.dealer_GBps, "dealer generation rate, GB/s (default unbounded)");
  opt(queue, "--interarrival", f.interarrival_s, "mean inter-arrival time, s");
  opt(queue, "--jobs", f.n_jobs, "number of jobs");
  opt(queue, "--workers", f.workers, "concurrent online executors");
  opt(queue, "--sweep-GB", f.sweep_GB, "run once per pool capacity, GB");
  CLI::App* ctx = sub("context-sweep", "latency against sequence length");
  opt(ctx, "--lengths", f.lengths, "sequence lengths in [16, 512]")->capture_default_str();
  opt(ctx, "--schemes", f.schemes, "schemes to sweep (default all)");
  CLI::App* hw = sub("hw-sweep", "per-sample latency against compute speedup");
  opt(hw, "--x", f.xs, "speedup factors >= 1")->capture_default_str();
  CLI::App* fit = sub("fit-profile", "fit compute, rounds and bytes to observed latencies");
  opt(fit, "--observations", f.observations,
      "CSV with 'network,latency_s' or 'rtt_s,bandwidth_Bps,latency_s'");
  opt(fit, "--anchors", f.anchors, "anchors YAML used when no CSV is given");
  CLI::App* kv = app.add_subcommand("kernels-verify", "run the MPC kernel oracles");
  opt(kv, "--domain-bits", f.domain_bits, "DPF/DCF domain size, 1..20")->capture_default_str();
  opt(kv, "--trials", f.trials, "keys per function family")->capture_default_str();
  opt(kv, "--seed", f.seed, "random seed")->capture_default_str();
  opt(kv, "--format", f.format, "stdout format: md, csv or json")
      ->check(CLI::IsMember({"md", "csv", "json"}));
  opt(kv, "--report-dir", f.report_dir, "directory for report files");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string cmd = chosen->get_name();
  try {
    if (chosen == kv) {
      bool pass = false;
      const Report r = cmd_kernels(f, pass);
      emit(r, f, o, cmd, out, err);
      return pass ? kExitOk : kExitVerify;
    }
    const Context c = resolve(f, o, cmd);
    Report r;
    if (chosen == latency) r = cmd_latency(f, c);
    else if (chosen == thr) r = cmd_throughput(f, c);
    else if (chosen == en) r = cmd_energy(f, c);
    else if (chosen == cost) r = cmd_cost(f, c);
    else if (chosen == queue) r = cmd_queue(f, c);
    else if (chosen == ctx) r = cmd_context(f, c);
    else if (chosen == hw) r = cmd_hw(f, c);
    else r = cmd_fit(f, c, o);
    emit(r, f, o, cmd, out, err);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "ppml-sim: error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    err << "ppml-sim: infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  }
}

}  // namespace ppml
