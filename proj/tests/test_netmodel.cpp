#include <limits>

#include "doctest.h"
#include "ppml/error.hpp"
#include "ppml/netmodel.hpp"

using namespace ppml;

TEST_CASE("presets carry the published link parameters") {
  CHECK(preset("wan_s").rtt_s == 0.070);
  CHECK(preset("wan_s").bandwidth_Bps == 70e6);
  CHECK(preset("wan_m").bandwidth_Bps == 1e9);
  CHECK(preset("wan_f").bandwidth_Bps == 50e9);
  CHECK(preset("lan_s").rtt_s == 2e-5);
  CHECK(preset("lan_s").bandwidth_Bps == 1e9);
  CHECK(preset("lan_f").rtt_s == 2e-5);
  CHECK(preset("lan_f").bandwidth_Bps == 50e9);
  CHECK(preset("WAN_M").name == "wan_m");
  CHECK_THROWS_AS(preset("wan_x"), ConfigError);
}

TEST_CASE("custom configs are validated") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(make_network("c", 0.0, inf), ConfigError);
  CHECK_THROWS_AS(make_network("c", -1.0, 1e9), ConfigError);
  CHECK_THROWS_AS(make_network("c", 0.01, 0.0), ConfigError);
  CHECK_NOTHROW(make_network("c", 0.0, 1e9));
}

TEST_CASE("comm_time prices rounds and bytes") {
  CHECK(comm_time(0, 0, preset("wan_s")) == 0.0);
  // Fitted BERT-Tiny A2B online profile: 455 rounds, 82 MB.
  CHECK(comm_time(455, 82e6, preset("wan_s")) == doctest::Approx(33.0).epsilon(0.02));
  CHECK(comm_time(455, 82e6, preset("lan_f")) == doctest::Approx(0.0107).epsilon(0.02));
}

TEST_CASE("comm_time is separable and monotone") {
  for (const auto& name : preset_names()) {
    const NetworkConfig c = preset(name);
    CHECK(comm_time(7, 3e6, c) == doctest::Approx(comm_time(7, 0, c) + comm_time(0, 3e6, c)));
    CHECK(comm_time(8, 3e6, c) >= comm_time(7, 3e6, c));
    CHECK(comm_time(7, 4e6, c) >= comm_time(7, 3e6, c));
  }
  CHECK(comm_time(5, 1e9, preset("wan_f")) <= comm_time(5, 1e9, preset("wan_m")));
}

TEST_CASE("link tiers and port pricing") {
  CHECK(link_tier(preset("wan_s")) == LinkTier::kLow);
  CHECK(link_tier(preset("wan_m")) == LinkTier::kMedium);
  CHECK(link_tier(preset("lan_s")) == LinkTier::kMedium);
  CHECK(link_tier(preset("wan_f")) == LinkTier::kHigh);
  CHECK(uses_fast_port(preset("lan_f")));
  CHECK_FALSE(uses_fast_port(preset("wan_m")));
}
