// Copyright 2026 The ppml-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "ppml/config.hpp"
#include "ppml/error.hpp"
#include "ppml/projector.hpp"

using namespace ppml;

namespace {

const Calibration& shipped() {
  static const Calibration cal = load_calibration_file(default_calibration_path()).cal;
  return cal;
}

}  // namespace

TEST_CASE("scale_hardware leaves communication alone") {
  const CostProfile p = builtin_profile("resnet20", Scheme::kA2b, 4, shipped());
  const CostProfile q = scale_hardware(p, 1);
  CHECK(q.compute_speedup == 1);
  CHECK(online_latency(q, preset("wan_m")) == online_latency(p, preset("wan_m")));
  const CostProfile r = scale_hardware(p, 8);
  CHECK(r.online_compute_s() == doctest::Approx(p.online_compute_s() / 8).epsilon(1e-15));
  CHECK(r.offline_compute_s() == doctest::Approx(p.offline_compute_s() / 8).epsilon(1e-15));
  CHECK(r.totals.online_rounds == p.totals.online_rounds);
  CHECK(r.totals.online_bytes == p.totals.online_bytes);
  CHECK(r.totals.offline_bytes == p.totals.offline_bytes);
  CHECK_THROWS_AS(scale_hardware(p, 0.5), ConfigError);
  CHECK_THROWS_AS(scale_hardware(p, NAN), ConfigError);
}

TEST_CASE("scale_hardware composes multiplicatively") {
  const CostProfile p = builtin_profile("bert_tiny", Scheme::kFss, 1, shipped());
  const NetworkConfig cfg = preset("lan_s");
  for (auto [a, b] : {std::pair{2.0, 3.0}, {1.25, 8.0}, {10.0, 10.0}}) {
    CAPTURE(a);
    CAPTURE(b);
    CHECK(online_latency(scale_hardware(scale_hardware(p, a), b), cfg) ==
          online_latency(scale_hardware(p, a * b), cfg));
  }
}

TEST_CASE("infinite speedup leaves only communication") {
  const CostProfile p = builtin_profile("bert_base", Scheme::kA2b, 1, shipped());
  const NetworkConfig cfg = preset("wan_m");
  const double limit = comm_time(p.totals.online_rounds, p.totals.online_bytes, cfg);
  CHECK(online_latency(scale_hardware(p, 1e15), cfg) == doctest::Approx(limit).epsilon(1e-12));
}

TEST_CASE("view_latency options") {
  const CostProfile p = builtin_profile("resnet20", Scheme::kFss, 16, shipped());
  const NetworkConfig cfg = preset("wan_f");
  const double on = online_latency(p, cfg), off = offline_latency(p, cfg);
  CHECK(view_latency(p, cfg, {}) == on);
  CHECK(view_latency(p, cfg, {true, false}) == on + off);
  CHECK(view_latency(p, cfg, {true, true}) == doctest::Approx((on + off) / 16));
}

TEST_CASE("context curves are normalized at 128 and monotone") {
  const std::vector<std::int64_t> lengths{16, 32, 64, 128, 256, 512};
  const NetworkConfig cfg = preset("wan_m");
  std::map<Scheme, double> at512;
  for (Scheme s : {Scheme::kA2b, Scheme::kFss, Scheme::kFhe}) {
    const auto curve = context_sweep(lengths, s, cfg, shipped());
    REQUIRE(curve.size() == lengths.size());
    CHECK(curve[3].x == 128);
    CHECK(curve[3].normalized == 1.0);
    for (size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].value > curve[i - 1].value);
    at512[s] = curve.back().normalized;
  }
  CHECK(at512[Scheme::kFhe] > at512[Scheme::kA2b]);
  CHECK(at512[Scheme::kFhe] > at512[Scheme::kFss]);

  // Without the max layer, MPC grows more slowly.
  ContextOptions nomax;
  nomax.include_max = false;
  for (Scheme s : {Scheme::kA2b, Scheme::kFss}) {
    const auto curve = context_sweep(lengths, s, cfg, shipped(), nomax);
    CHECK(curve.back().normalized < at512[s]);
    CHECK(curve.back().normalized < at512[Scheme::kFhe]);
  }
}

TEST_CASE("context lengths outside [16, 512] are rejected") {
  CHECK_THROWS_AS(context_sweep({8}, Scheme::kA2b, preset("wan_m"), shipped()), ConfigError);
  CHECK_THROWS_AS(context_sweep({1024}, Scheme::kFhe, preset("wan_m"), shipped()), ConfigError);
}

TEST_CASE("crossover of simple curves") {
  auto a = [](double x) { return 100.0 / x; };
  auto b = [](double) { return 10.0; };
  const Crossover c = crossover(a, b, 1, 100);
  REQUIRE(c.x);
  CHECK(*c.x == doctest::Approx(10).epsilon(1e-9));
  CHECK(c.gap_at_lo > 0);
  CHECK(c.gap_at_hi < 0);

  const Crossover none = crossover(a, [](double) { return 0.5; }, 1, 100);
  CHECK_FALSE(none.x);
  CHECK(none.gap_at_hi > 0);

  const Crossover same = crossover(a, a, 2, 50);
  REQUIRE(same.x);
  CHECK(*same.x == 2);

  CHECK_THROWS_AS(crossover([](double x) { return std::sin(x); }, b, 1, 100), ConfigError);
  CHECK_THROWS_AS(crossover(a, b, 0.5, 100), ConfigError);
}

TEST_CASE("fhe overtakes batched a2b on ResNet-50 within 100x") {
  const NetworkConfig cfg = preset("wan_m");
  const Contender fhe{"fhe", builtin_profile("resnet50", Scheme::kFhe, 1, shipped()), {false, true}};
  const Contender a2b{"a2b", builtin_profile("resnet50", Scheme::kA2b, 128, shipped()), {true, true}};
  const Crossover c = crossover(fhe, a2b, cfg, 1, 100);
  REQUIRE(c.x);
  CHECK(*c.x > 1);
  CHECK(*c.x < 100);
  CHECK(fhe.latency(cfg, *c.x * 0.99) > a2b.latency(cfg, *c.x * 0.99));
  CHECK(fhe.latency(cfg, *c.x * 1.01) < a2b.latency(cfg, *c.x * 1.01));
}

TEST_CASE("fhe does not catch batched fss on BERT-Base within 100x") {
  const NetworkConfig cfg = preset("wan_m");
  const Contender fhe{"fhe", builtin_profile("bert_base", Scheme::kFhe, 1, shipped()), {false, true}};
  const Contender fss{"fss", builtin_profile("bert_base", Scheme::kFss, 128, shipped()), {false, true}};
  const Crossover c = crossover(fhe, fss, cfg, 1, 100);
  CHECK_FALSE(c.x);
  CHECK(c.gap_at_hi > 0);
}

TEST_CASE("hw_sweep normalizations") {
  const NetworkConfig cfg = preset("wan_m");
  const std::vector<Contender> cs{
      {"fhe", builtin_profile("bert_tiny", Scheme::kFhe, 1, shipped()), {false, true}},
      {"a2b", builtin_profile("bert_tiny", Scheme::kA2b, 128, shipped()), {true, true}},
      {"fss", builtin_profile("bert_tiny", Scheme::kFss, 128, shipped()), {true, true}}};
  const auto rows = hw_sweep(cs, {1, 10, 100}, cfg);
  REQUIRE(rows.size() == 3);
  for (size_t i = 0; i < cs.size(); ++i) CHECK(rows[0].global[i] == 1.0);
  for (const auto& r : rows) {
    CHECK(*std::min_element(r.per_x.begin(), r.per_x.end()) == 1.0);
    for (size_t i = 0; i < cs.size(); ++i) {
      CHECK(r.latency[i] == cs[i].latency(cfg, r.x));
      CHECK(r.global[i] <= 1.0);
    }
  }
}
