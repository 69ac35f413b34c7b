// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ppml/cli.hpp"
#include "ppml/config.hpp"
#include "ppml/error.hpp"
#include "ppml/report.hpp"

using namespace ppml;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  unsetenv("PPML_REPORT_DIR");
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

json run_json(std::vector<std::string> args) {
  args.push_back("--format");
  args.push_back("json");
  const Run r = run(args);
  REQUIRE_MESSAGE(r.code == 0, r.err);
  return json::parse(r.out);
}

const json& table(const json& report, const std::string& name) {
  for (const auto& t : report["tables"])
    if (t["name"] == name) return t;
  FAIL("no table " << name);
  static const json none;
  return none;
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("ppml-sim-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string write(const std::filesystem::path& p, const std::string& body) {
  std::ofstream(p) << body;
  return p.string();
}

const std::string kScenarios = PPML_TEST_SCENARIO_DIR;

}  // namespace

TEST_CASE("latency of BERT-Tiny under A2B on WAN_S is about 33 s") {
  const json r = run_json({"latency", "--model", "bert_tiny", "--scheme", "a2b", "--net", "wan_s",
                           "--batch", "1"});
  CHECK(r["schema"] == std::string(kReportSchema));
  CHECK(r["command"] == "latency");
  const double s = table(r, "latency")["rows"][0]["online_s"];
  CHECK(s == doctest::Approx(33).epsilon(0.05));
  CHECK(r["meta"]["seed"] == "1");
  CHECK(r["meta"]["calibration_sha256"] ==
        sha256_hex(read_text_file(default_calibration_path())));
}

TEST_CASE("kernels-verify passes at the documented size") {
  const Run r = run({"kernels-verify", "--domain-bits", "10", "--trials", "100"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("all kernel checks passed") != std::string::npos);
  const json j = run_json({"kernels-verify", "--domain-bits", "6", "--trials", "10", "--seed", "5"});
  CHECK(j["meta"]["seed"] == "5");
  for (const auto& row : table(j, "kernels")["rows"]) {
    CAPTURE(row["check"].get<std::string>());
    CHECK(row["pass"] == true);
    CHECK(row["failures"] == 0);
  }
}

TEST_CASE("kernels-verify rejects out-of-range sizes") {
  CHECK(run({"kernels-verify", "--domain-bits", "40"}).code == kExitConfig);
  CHECK(run({"kernels-verify", "--trials", "0"}).code == kExitConfig);
}

TEST_CASE("malformed scenario exits 1 with a line-anchored diagnostic") {
  const auto dir = scratch("malformed");
  const std::string path = write(dir / "bad.yaml", "model:\n  name: bert_tiny\n  batchsize: 4\n");
  const Run r = run({"latency", "--scenario", path});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find(path + ":3:") != std::string::npos);
  CHECK(r.out.empty());

  const std::string broken = write(dir / "broken.yaml", "model: [bert_tiny\n");
  CHECK(run({"latency", "--scenario", broken}).code == kExitConfig);
  CHECK(run({"latency", "--scenario", (dir / "missing.yaml").string()}).code == kExitConfig);
}

TEST_CASE("bad flags exit 1") {
  CHECK(run({"latency", "--net", "moon"}).code == kExitConfig);
  CHECK(run({"latency", "--scheme", "quantum"}).code == kExitConfig);
  CHECK(run({"latency", "--frobnicate"}).code == kExitConfig);
  CHECK(run({"latency", "--rtt", "0.01"}).code == kExitConfig);
  CHECK(run({"latency", "--net", "wan_s", "--rtt", "0.01", "--bandwidth", "1e9"}).code == kExitConfig);
  CHECK(run({"latency", "--batch", "0"}).code == kExitConfig);
  CHECK(run({"latency", "--format", "xml"}).code == kExitConfig);
  CHECK(run({}).code == kExitConfig);
  CHECK(run({"teleport"}).code == kExitConfig);
}

TEST_CASE("help exits 0") {
  const Run r = run({"--help"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("queue-sim") != std::string::npos);
}

TEST_CASE("starved pool exits 2") {
  const Run r = run({"queue-sim", "--scenario", kScenarios + "/starved_pool.yaml"});
  CHECK(r.code == kExitInfeasible);
  CHECK(r.err.find("starvation") != std::string::npos);
}

TEST_CASE("flags override the scenario file") {
  const std::string sc = kScenarios + "/bert_tiny_a2b_wan_m.yaml";
  const json base = run_json({"latency", "--scenario", sc});
  CHECK(base["meta"]["batch"] == "128");
  CHECK(base["meta"]["include_offline"] == "true");
  const json over = run_json({"latency", "--scenario", sc, "--batch", "1", "--online-only", "--net",
                              "wan_s"});
  CHECK(over["meta"]["batch"] == "1");
  CHECK(over["meta"]["include_offline"] == "false");
  CHECK(table(over, "latency")["rows"][0]["network"] == "wan_s");
  CHECK(table(over, "latency")["rows"][0]["online_s"].get<double>() ==
        doctest::Approx(33).epsilon(0.05));

  const json custom = run_json({"latency", "--rtt", "0.07", "--bandwidth", "7e7"});
  const json named = run_json({"latency", "--net", "wan_s"});
  CHECK(table(custom, "latency")["rows"][0]["online_s"] == table(named, "latency")["rows"][0]["online_s"]);
}

TEST_CASE("queue reports are deterministic and echo the seed") {
  const std::vector<std::string> args{"queue-sim", "--scenario",
                                      kScenarios + "/queue_fss_resnet20.yaml", "--jobs", "40"};
  const json a = run_json(args), b = run_json(args);
  CHECK(a == b);
  CHECK(a["meta"]["seed"] == "1");
  CHECK(table(a, "jobs")["rows"].size() == 40);

  std::vector<std::string> reseeded = args;
  reseeded.insert(reseeded.end(), {"--seed", "7"});
  const json c = run_json(reseeded);
  CHECK(c["meta"]["seed"] == "7");
  CHECK(table(c, "jobs")["rows"] != table(a, "jobs")["rows"]);
}

TEST_CASE("pool sweep reports starvation as a row") {
  const json r = run_json({"queue-sim", "--scenario", kScenarios + "/queue_fss_resnet20.yaml",
                           "--jobs", "50", "--sweep-GB", "1", "1000"});
  const auto& rows = table(r, "summary")["rows"];
  REQUIRE(rows.size() == 2);
  CHECK(rows[0]["status"] == "starved");
  CHECK(rows[1]["status"] == "ok");
  CHECK(rows[1]["jobs"] == 50);
}

TEST_CASE("report files land in the report directory") {
  const auto dir = scratch("reports");
  unsetenv("PPML_REPORT_DIR");
  std::ostringstream out, err;
  const int code = run_cli({"queue-sim", "--scenario", kScenarios + "/queue_fss_resnet20.yaml",
                            "--jobs", "20", "--report-dir", dir.string()},
                           out, err);
  REQUIRE(code == 0);
  for (const char* f : {"queue-sim.json", "queue-sim.md", "queue-sim.csv", "queue-sim_jobs.csv",
                        "queue-sim_events.csv", "queue-sim_collapse.csv"})
    CHECK(std::filesystem::exists(dir / f));
  std::ifstream ev(dir / "queue-sim_events.csv");
  std::string header;
  std::getline(ev, header);
  CHECK(header == "time_s,kind,job_id,pool_level_bytes");
  // Summaries leave the long series out of stdout.
  CHECK(out.str().find("rows, see queue-sim_jobs.csv") != std::string::npos);

  const auto env_dir = scratch("env-reports");
  setenv("PPML_REPORT_DIR", env_dir.string().c_str(), 1);
  std::ostringstream o2, e2;
  CHECK(run_cli({"cost", "--model", "resnet20", "--scheme", "fss"}, o2, e2) == 0);
  unsetenv("PPML_REPORT_DIR");
  CHECK(std::filesystem::exists(env_dir / "cost.json"));
  CHECK(std::filesystem::exists(env_dir / "cost.csv"));
}

TEST_CASE("csv output") {
  const Run r = run({"cost", "--model", "bert_base", "--scheme", "fss", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("item,usd,usd_per_sample\n", 0) == 0);
  CHECK(r.out.find("\ntotal,") != std::string::npos);
}

TEST_CASE("energy and cost reports") {
  const json e = run_json({"energy", "--scenario", kScenarios + "/bert_tiny_a2b_wan_m.yaml"});
  const auto& s = table(e, "summary")["rows"][0];
  CHECK(s["idle_wait_share"].get<double>() > 0.3);
  CHECK(s["total_J"].get<double>() > s["idle_wait_J"].get<double>());

  const json c = run_json({"cost", "--scenario", kScenarios + "/bert_base_fss_wan_f.yaml"});
  double sum = 0, total = 0;
  for (const auto& row : table(c, "cost")["rows"]) {
    if (row["item"] == "total") total = row["usd"];
    else sum += row["usd"].get<double>();
  }
  CHECK(sum == doctest::Approx(total));
}

TEST_CASE("throughput, sweeps and crossovers") {
  const json t = run_json({"throughput", "--model", "resnet50", "--scheme", "fss", "--batch", "128",
                           "--all-nets"});
  CHECK(table(t, "throughput")["rows"].size() == 5);

  const json cs = run_json({"context-sweep", "--model", "bert_base", "--schemes", "fhe", "--lengths",
                            "64", "128", "512"});
  const auto& rows = table(cs, "context")["rows"];
  REQUIRE(rows.size() == 3);
  CHECK(rows[1]["normalized"] == 1.0);
  CHECK(rows[2]["normalized"].get<double>() > 5);
  CHECK(run({"context-sweep", "--model", "bert_base", "--lengths", "1024"}).code == kExitConfig);

  const json hw = run_json({"hw-sweep", "--model", "bert_base", "--batch", "128"});
  CHECK(table(hw, "hw")["rows"].size() == 7);
  CHECK(table(hw, "crossover")["rows"].size() == 2);
  CHECK(run({"hw-sweep", "--x", "0.5", "2"}).code == kExitConfig);
}

TEST_CASE("fit-profile recovers a synthetic latency model") {
  // latency = 2 + 40 * rtt + 3e8 / bandwidth
  std::string csv = "rtt_s,bandwidth_Bps,latency_s\n";
  for (auto [rtt, bw] : {std::pair{0.001, 1e9}, {0.01, 1e8}, {0.07, 7e7}, {0.1, 1e10}, {0.03, 5e8}}) {
    std::ostringstream row;
    row.precision(17);
    row << rtt << ',' << bw << ',' << 2 + 40 * rtt + 3e8 / bw << '\n';
    csv += row.str();
  }
  const auto dir = scratch("fit");
  const json r = run_json({"fit-profile", "--observations", write(dir / "obs.csv", csv)});
  const auto& fit = table(r, "fit")["rows"][0];
  CHECK(fit["compute_s"].get<double>() == doctest::Approx(2).epsilon(1e-6));
  CHECK(fit["rounds"].get<double>() == doctest::Approx(40).epsilon(1e-6));
  CHECK(fit["online_GB"].get<double>() == doctest::Approx(0.3).epsilon(1e-6));

  const std::string bad = write(dir / "bad.csv", "network,latency_s\nwan_s,1\nwan_m,fast\n");
  const Run b = run({"fit-profile", "--observations", bad});
  CHECK(b.code == kExitConfig);
  CHECK(b.err.find(bad + ":3:") != std::string::npos);

  const json anchors = run_json({"fit-profile", "--model", "bert_tiny", "--scheme", "a2b"});
  CHECK(table(anchors, "observations")["rows"].size() == 5);
}

// ---------------------------------------------------------------------------

TEST_CASE("report writers") {
  Report r;
  r.command = "demo";
  r.meta["seed"] = "3";
  Table& t = r.table("main", "Demo", {"name", "value", "count", "ok"});
  t.add({std::string("a,b"), 1.5, std::int64_t{2}, true});
  t.add({std::string("say \"hi\""), 1e-12, std::int64_t{-1}, false});
  CHECK_THROWS_AS(t.add({std::string("short")}), ConfigError);

  std::ostringstream csv;
  write_csv(csv, r.tables[0]);
  CHECK(csv.str() == "name,value,count,ok\n\"a,b\",1.5,2,true\n\"say \"\"hi\"\"\",1e-12,-1,false\n");

  std::ostringstream js;
  write_json(js, r);
  const json j = json::parse(js.str());
  CHECK(j["schema"] == "ppml-report/1");
  CHECK(j["meta"]["seed"] == "3");
  CHECK(j["tables"][0]["rows"][1]["count"] == -1);
  CHECK(j["tables"][0]["rows"][0]["ok"] == true);

  std::ostringstream md;
  write_markdown(md, r);
  CHECK(md.str().find("| name | value | count | ok |") != std::string::npos);
  CHECK(md.str().find("| a,b | 1.5 | 2 | true |") != std::string::npos);
}
