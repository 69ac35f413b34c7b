#include <cmath>
#include <limits>
#include <string>

#include "doctest.h"
#include "ppml/error.hpp"
#include "ppml/mpc/fss.hpp"
#include "ppml/mpc/kernels.hpp"
#include "ppml/mpc/serialize.hpp"
#include "ppml/protocols.hpp"

using namespace ppml;

namespace {

const LayerCost& find_layer(const CostProfile& p, const std::string& name) {
  for (const auto& l : p.per_layer)
    if (l.layer == name) return l;
  FAIL("no layer " << name);
  return p.per_layer.front();
}

std::vector<Observation> row(const std::vector<double>& lat) {
  const char* nets[] = {"lan_s", "lan_f", "wan_s", "wan_m", "wan_f"};
  std::vector<Observation> obs;
  for (size_t i = 0; i < lat.size(); ++i) obs.push_back({preset(nets[i]), lat[i]});
  return obs;
}

}  // namespace

TEST_CASE("a2b_nonlinear_cost closed form") {
  const GateCost empty = a2b_nonlinear_cost(0, 64);
  CHECK(empty.rounds == 2 + 6);
  CHECK(empty.online_bytes == 0);
  CHECK(empty.offline_bytes == 0);
  CHECK(a2b_nonlinear_cost(1e6, 64).online_bytes == 48e6);
  CHECK(a2b_nonlinear_cost(1e6, 32).rounds == 2 + 5);
  A2bConstants c;
  c.r0 = 3;
  c.r1 = 2;
  c.c = 4;
  CHECK(a2b_nonlinear_cost(10, 64, c).rounds == 3 + 12);
  CHECK(a2b_nonlinear_cost(10, 64, c).online_bytes == 4 * 64 * 10 / 8);
  CHECK_THROWS_AS(a2b_nonlinear_cost(1, 16), ConfigError);
  CHECK_THROWS_AS(a2b_nonlinear_cost(-1, 64), ConfigError);
}

TEST_CASE("fss_nonlinear_cost closed form") {
  const FssGateCost empty = fss_nonlinear_cost(0, 64);
  CHECK(empty.rounds == 1);
  CHECK(empty.online_bytes == 0);
  CHECK(empty.key_bytes == 0);
  CHECK(fss_nonlinear_cost(1, 64).key_bytes == 2048);
  CHECK(fss_nonlinear_cost(1, 64, 128, 1.5).key_bytes == 3072);
  CHECK(fss_nonlinear_cost(5, 32).online_bytes == 20);
  CHECK_THROWS_AS(fss_nonlinear_cost(1, 64, 0), ConfigError);
}

TEST_CASE("closed-form key sizes equal serialized kernel keys") {
  // Comparison key: DCF over the low 63 bits with a two-word payload.
  mpc::Prg prg;
  const mpc::Ring beta[2] = {1, 2};
  const auto dcf = mpc::dcf_keygen_raw(5, beta, 63, {1, 2}, {3, 4}, prg);
  CHECK(mpc::encode(dcf.first).size() == fss_nonlinear_cost(1, 64).key_bytes);
  // Lookup-table key: DPF over a 10-bit domain.
  const auto dpf = mpc::dpf_keygen(3, 7, 10, 99);
  CHECK(mpc::encode(dpf.first).size() == fss_lut_key_bytes(10, 64));
  CHECK(fss_lut_key_bytes(10, 64) == 184);
  // Dealer material per element.
  CHECK(mpc::compare_record_bytes() == a2b_nonlinear_cost(1, 64).offline_bytes);
  CHECK(mpc::beaver_record_bytes() == beaver_mul_cost(1, 64).offline_bytes);
}

TEST_CASE("instrumented kernels match the analytic gate costs") {
  mpc::Dealer dealer(5);
  mpc::Rng rng(6);
  for (size_t n : {size_t{1}, size_t{10}, size_t{10000}}) {
    CAPTURE(n);
    std::vector<mpc::Ring> xs(n);
    for (auto& x : xs) x = rng.next();
    {
      mpc::Session s;
      mpc::a2b_compare(s, mpc::share_vec(xs, rng), dealer.compare_material(n));
      const GateCost g = a2b_nonlinear_cost(static_cast<double>(n), 64);
      CHECK(s.stats().rounds == g.rounds);
      CHECK(s.stats().bytes_sent[0] == g.online_bytes);
      CHECK(s.stats().bytes_sent[1] == g.online_bytes);
    }
    {
      mpc::Session s;
      mpc::fss_relu(s, mpc::share_vec(xs, rng), dealer.relu_keys(n));
      const FssGateCost g = fss_nonlinear_cost(static_cast<double>(n), 64);
      CHECK(s.stats().rounds == g.rounds);
      CHECK(s.stats().bytes_sent[0] == g.online_bytes);
      CHECK(s.stats().bytes_sent[1] == g.online_bytes);
    }
    {
      mpc::Session s;
      mpc::beaver_mul(s, mpc::share_vec(xs, rng), mpc::share_vec(xs, rng), dealer.beaver_triple(n));
      const GateCost g = beaver_mul_cost(static_cast<double>(n), 64);
      CHECK(s.stats().rounds == g.rounds);
      CHECK(s.stats().bytes_sent[0] == g.online_bytes);
    }
  }
}

TEST_CASE("profile totals equal per-layer sums") {
  const Calibration cal = default_calibration();
  for (const auto& m : builtin_model_names()) {
    for (Scheme s : {Scheme::kA2b, Scheme::kFss, Scheme::kFhe}) {
      CAPTURE(m);
      const CostProfile p = builtin_profile(m, s, 4, cal);
      LayerCost sum;
      for (const auto& l : p.per_layer) sum += l;
      CHECK(sum.online_rounds == p.totals.online_rounds);
      CHECK(sum.online_bytes == p.totals.online_bytes);
      CHECK(sum.offline_bytes == p.totals.offline_bytes);
      CHECK(sum.online_compute_s == p.totals.online_compute_s);
      CHECK(sum.key_bytes == p.totals.key_bytes);
      CHECK(sum.gpu_mem_bytes == p.totals.gpu_mem_bytes);
      CHECK(sum.cpu_mem_bytes == p.totals.cpu_mem_bytes);
    }
  }
}

TEST_CASE("scheme invariants on builtin models") {
  const Calibration cal = default_calibration();
  for (const auto& m : builtin_model_names()) {
    CAPTURE(m);
    const CostProfile a = builtin_profile(m, Scheme::kA2b, 1, cal);
    const CostProfile f = builtin_profile(m, Scheme::kFss, 1, cal);
    const CostProfile h = builtin_profile(m, Scheme::kFhe, 1, cal);
    CHECK(f.totals.online_rounds <= a.totals.online_rounds);
    CHECK(f.totals.key_bytes > 0);
    CHECK(a.totals.key_bytes == 0);
    CHECK(a.totals.offline_bytes > 0);
    CHECK(h.totals.online_rounds == 2);
    CHECK(h.totals.offline_bytes == 0);
  }
}

TEST_CASE("batch scales bytes but not rounds") {
  const Calibration cal = default_calibration();
  for (Scheme s : {Scheme::kA2b, Scheme::kFss}) {
    const CostProfile one = builtin_profile("resnet20", s, 1, cal);
    const CostProfile many = builtin_profile("resnet20", s, 128, cal);
    CHECK(many.totals.online_rounds == one.totals.online_rounds);
    CHECK(many.totals.online_bytes == doctest::Approx(128 * one.totals.online_bytes));
    CHECK(many.totals.offline_bytes == doctest::Approx(128 * one.totals.offline_bytes));
  }
}

TEST_CASE("calibration scales apply per model") {
  Calibration cal = default_calibration();
  const CostProfile base = builtin_profile("bert_tiny", Scheme::kA2b, 1, cal);
  cal.a2b.models["bert_tiny"].rounds = 2;
  cal.a2b.models["bert_tiny"].online_bytes = 0.5;
  const CostProfile scaled = builtin_profile("bert_tiny", Scheme::kA2b, 1, cal);
  CHECK(scaled.totals.online_rounds == doctest::Approx(2 * base.totals.online_rounds));
  CHECK(scaled.totals.online_bytes == doctest::Approx(0.5 * base.totals.online_bytes));
  // Custom models fall back to the family default.
  cal.a2b.models["default_transformer"].rounds = 3;
  ModelGraph g = build_builtin_model("bert_tiny", 128, 1);
  g.name = "my_bert";
  CHECK(make_profile(g, Scheme::kA2b, cal).totals.online_rounds ==
        doctest::Approx(3 * base.totals.online_rounds));
}

TEST_CASE("fhe profile") {
  Calibration cal = default_calibration();
  FheBackend& be = cal.fhe[ModelFamily::kTransformer];
  be.pt_mult = 1e-4;
  be.ct_mult = 4e-4;
  be.rotation = 4e-4;
  be.bootstrap = 0.1;

  SUBCASE("empty graph") {
    ModelGraph g = build_builtin_model("bert_tiny", 128, 1);
    g.layers.clear();
    finalize_graph(g);
    const CostProfile p = fhe_profile(g, be);
    CHECK(p.totals.online_compute_s == 0);
    CHECK(p.totals.online_rounds == 2);
  }
  SUBCASE("attention quadratic, feed-forward linear") {
    const CostProfile p128 = builtin_profile("bert_base", Scheme::kFhe, 1, cal, 128);
    const CostProfile p256 = builtin_profile("bert_base", Scheme::kFhe, 1, cal, 256);
    const double s128 = find_layer(p128, "attn_scores").online_compute_s;
    CHECK(find_layer(p256, "attn_scores").online_compute_s == doctest::Approx(4 * s128));
    CHECK(find_layer(p256, "ff_in").online_compute_s ==
          doctest::Approx(2 * find_layer(p128, "ff_in").online_compute_s));
  }
  SUBCASE("network invariance beyond the boundary transfers") {
    const CostProfile p = builtin_profile("bert_tiny", Scheme::kFhe, 1, cal);
    for (const auto& name : preset_names()) {
      const NetworkConfig c = preset(name);
      const double boundary = comm_time(2, p.totals.online_bytes, c);
      CHECK(online_latency(p, c) - boundary == doctest::Approx(p.online_compute_s()).epsilon(1e-12));
    }
  }
  SUBCASE("missing entries are rejected") {
    FheBackend bad = be;
    bad.bootstrap = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fhe_profile(build_builtin_model("bert_tiny", 128, 1), bad), ConfigError);
    FheBackend no_gelu = be;
    no_gelu.nonlinear.erase(LayerKind::kGelu);
    CHECK_THROWS_AS(fhe_profile(build_builtin_model("bert_tiny", 128, 1), no_gelu), ConfigError);
  }
  SUBCASE("gpu memory follows ciphertext expansion") {
    const CostProfile p = builtin_profile("bert_tiny", Scheme::kFhe, 1, cal);
    const double ct = 2.0 * 65536 * be.limbs * 8;
    // ff_in: 128x128 in (1 ct), 128x512 out (2 cts).
    CHECK(find_layer(p, "ff_in").gpu_mem_bytes == 3 * ct);
  }
}

TEST_CASE("fit_profile") {
  SUBCASE("synthetic data is recovered exactly") {
    const double c = 0.37, r = 123, b = 4.5e8;
    std::vector<Observation> obs;
    for (const auto& n : preset_names()) {
      const NetworkConfig cfg = preset(n);
      obs.push_back({cfg, c + comm_time(r, b, cfg)});
    }
    const CalibrationFit f = fit_profile(obs);
    CHECK(std::abs(f.compute_s - c) <= 1e-9 * c);
    CHECK(std::abs(f.rounds - r) <= 1e-9 * r);
    CHECK(std::abs(f.online_bytes - b) <= 1e-9 * b);
    CHECK(f.residual < 1e-9);
  }
  SUBCASE("published BERT-Tiny A2B online row") {
    const CalibrationFit f = fit_profile(row({0.23, 0.15, 33, 32, 32}));
    CHECK(f.compute_s == doctest::Approx(0.15).epsilon(0.15));
    CHECK(f.rounds == doctest::Approx(455).epsilon(0.05));
    CHECK(f.online_bytes == doctest::Approx(82e6).epsilon(0.15));
    CHECK(f.residual < 0.10);
  }
  SUBCASE("constant row has no network terms") {
    const CalibrationFit f = fit_profile(row({4.0, 4.0, 4.0, 4.0, 4.0}));
    CHECK(f.rounds == doctest::Approx(0).epsilon(1e-9));
    CHECK(f.online_bytes < 1);
    CHECK(f.compute_s == doctest::Approx(4.0));
  }
  SUBCASE("degenerate inputs") {
    CHECK_THROWS_AS(fit_profile(row({1, 2})), ConfigError);
    std::vector<Observation> same(4, Observation{preset("wan_s"), 3.0});
    CHECK_THROWS_AS(fit_profile(same), ConfigError);
  }
}
