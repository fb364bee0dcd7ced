#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "d2dsim/core.hpp"
#include "d2dsim/radio.hpp"
#include "d2dsim/random.hpp"

using namespace d2dsim;

TEST_CASE("path gain examples") {
  // clamp boundary: 1^-eta = 1, and anything closer
  CHECK(path_gain({0, 0}, {1, 0}, 3.5) == 1.0);
  CHECK(path_gain({0, 0}, {0.2, 0}, 3.5) == 1.0);
  CHECK(path_gain({3, 4}, {3, 4}, 3.5) == 1.0);

  CHECK(path_gain({0, 0}, {10, 0}, 3.5) == doctest::Approx(3.1623e-4).epsilon(1e-4));
  CHECK(path_gain({0, 0}, {10, 0}, 3.5) == std::pow(10.0, -3.5));
}

TEST_CASE("path gain is non-increasing in distance") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    const double d1 = uniform_range(rng, 0.0, 400.0);
    const double d2 = d1 + uniform_range(rng, 0.0, 400.0);
    const double eta = uniform_range(rng, 2.0, 4.5);
    CHECK(path_gain({0, 0}, {d1, 0}, eta) >= path_gain({0, 0}, {d2, 0}, eta));
  }
}

TEST_CASE("snr to cqi boundaries") {
  CHECK(snr_to_cqi_db(-100.0) == 0);
  CHECK(snr_to_cqi_db(-6.71) == 0);
  CHECK(snr_to_cqi_db(-6.7) == 1);  // thresholds are inclusive
  CHECK(snr_to_cqi_db(22.7) == 15);
  CHECK(snr_to_cqi_db(80.0) == 15);
  CHECK(snr_to_cqi(0.0) == 0);
  CHECK(snr_to_cqi(-1.0) == 0);
}

TEST_CASE("snr to cqi agrees with an independent table lookup") {
  // Same spacing written out by hand, evaluated by a separate loop.
  const double table[15] = {-6.7, -4.6, -2.5, -0.4, 1.7,  3.8,  5.9,  8.0,
                            10.1, 12.2, 14.3, 16.4, 18.5, 20.6, 22.7};
  const auto oracle = [&](double snr_db) {
    int q = 0;
    for (int i = 0; i < 15; ++i)
      if (snr_db >= table[i]) q = i + 1;
    return q;
  };
  for (double snr = -12.0; snr <= 30.0; snr += 0.097)
    CHECK(snr_to_cqi_db(snr) == oracle(snr));
  CHECK(snr_to_cqi_db(10.0) == 8);
}

TEST_CASE("rate per rb") {
  CHECK(rate_per_rb(0) == 0);
  CHECK(rate_per_rb(15) == 933);  // floor(168 * 5.5547)
  CHECK(rate_per_rb(1) == 25);    // floor(168 * 0.1523)
  for (int q = 1; q <= 15; ++q) CHECK(rate_per_rb(q - 1) <= rate_per_rb(q));
  CHECK_THROWS_AS(rate_per_rb(-1), std::out_of_range);
  CHECK_THROWS_AS(rate_per_rb(16), std::out_of_range);
}

TEST_CASE("wifi rate step function") {
  const std::vector<WifiRateStep> steps{{10, 54e6}, {30, 24e6}, {50, 6e6}};
  CHECK(wifi_rate_bps(1.0, steps) == 54e6);
  CHECK(wifi_rate_bps(10.0, steps) == 54e6);  // inclusive bound
  CHECK(wifi_rate_bps(10.1, steps) == 24e6);
  CHECK(wifi_rate_bps(30.0, steps) == 24e6);
  CHECK(wifi_rate_bps(50.0, steps) == 6e6);
  CHECK(wifi_rate_bps(50.001, steps) == 0.0);
}

TEST_CASE("interference table examples") {
  SUBCASE("single node") {
    const std::vector<Position> pos{{3, 4}};
    const std::vector<double> pw{0.2};
    const InterferenceTable t = build_interference_table(pos, pw, 3.5);
    CHECK(t.n_nodes() == 1);
    CHECK(t.at(1, 1) == 0.0);
  }
  SUBCASE("co-located nodes at the clamp distance") {
    const std::vector<Position> pos{{0, 0}, {0, 0}};
    const std::vector<double> pw{0.2, 0.4};
    const InterferenceTable t = build_interference_table(pos, pw, 3.5);
    CHECK(t.at(1, 2) == 0.2);
    CHECK(t.at(2, 1) == 0.4);
  }
  SUBCASE("four nodes on a line match per-entry recomputation") {
    const std::vector<Position> pos{{0, 0}, {15, 0}, {70, 0}, {200, 0}};
    const std::vector<double> pw{0.2, 0.25, 0.1, 0.3};
    const double eta = 3.2;
    const InterferenceTable t = build_interference_table(pos, pw, eta);
    for (int n = 1; n <= 4; ++n) {
      for (int m = 1; m <= 4; ++m) {
        if (n == m) {
          CHECK(t.at(n, m) == 0.0);
        } else {
          const double d = std::abs(pos[n - 1].x - pos[m - 1].x);
          CHECK(t.at(n, m) == pw[n - 1] * std::pow(std::max(d, 1.0), -eta));
        }
      }
    }
  }
}

TEST_CASE("interference table properties on random topologies") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + uniform_index(rng, 8);
    std::vector<Position> pos(n);
    std::vector<double> pw(n);
    for (int i = 0; i < n; ++i) {
      pos[i] = {uniform_range(rng, -300, 300), uniform_range(rng, -300, 300)};
      pw[i] = uniform_range(rng, 0.0, 1.0);
    }
    const InterferenceTable t = build_interference_table(pos, pw, 3.5);
    for (int a = 1; a <= n; ++a) {
      CHECK(t.at(a, a) == 0.0);
      for (int b = 1; b <= n; ++b) CHECK(t.at(a, b) >= 0.0);
    }
    // pure function of its inputs
    CHECK(build_interference_table(pos, pw, 3.5) == t);
  }
}

TEST_CASE("estimate_cqi per arc") {
  std::vector<UserState> states{UserState::paired(2), UserState::paired(1),
                                UserState::cellular()};
  const NetworkGraph g = build_graph(states, 1);  // arcs (1,2) (1,4) (2,4) (3,4)
  const RadioParams params{0.2, 1e-10, 3.5};

  SUBCASE("deterministic and saturating") {
    const std::vector<Position> pos{{5, 0}, {9, 0}, {495, 0}};
    const auto cqi = estimate_cqi(g, pos, params);
    REQUIRE(cqi.size() == 4);
    CHECK(cqi[0] == 15);  // 4 m apart, huge snr
    for (int q : cqi) {
      CHECK(q >= 0);
      CHECK(q <= 15);
    }
    CHECK(estimate_cqi(g, pos, params) == cqi);
  }
  SUBCASE("matches a direct snr computation") {
    const std::vector<Position> pos{{150, 0}, {170, 0}, {430, 0}};
    const auto cqi = estimate_cqi(g, pos, params);
    for (size_t i = 0; i < g.arcs.size(); ++i) {
      const Arc& a = g.arcs[i];
      const Position pa = pos[a.tx - 1];
      const Position pb = a.rx == g.enb() ? Position{0, 0} : pos[a.rx - 1];
      const double snr =
          params.tx_power_w * path_gain(pa, pb, params.path_loss_exponent) /
          params.noise_w;
      CHECK(cqi[i] == snr_to_cqi(snr));
    }
  }
  SUBCASE("missing position names the user") {
    const std::vector<Position> pos{{5, 0}, {9, 0}};  // user 3 missing
    CHECK_THROWS_WITH_AS(estimate_cqi(g, pos, params),
                         "missing position for user 3", std::invalid_argument);
  }
}

TEST_CASE("rate table ties LTE rates to CQI and WiFi rates to distance") {
  std::vector<UserState> states{UserState::paired(2), UserState::paired(1)};
  const NetworkGraph g = build_graph(states, 1);  // (1,2) (1,3) (2,3)
  const std::vector<Position> pos{{100, 0}, {108, 0}};
  const std::vector<int> cqi{15, 7, 0};
  const std::vector<WifiRateStep> steps{{10, 54e6}, {30, 24e6}};

  const auto rates = build_rate_table(g, cqi, pos, steps);
  REQUIRE(rates.size() == 3);
  CHECK(rates[0].bits_per_rb == 933);
  CHECK(rates[0].wifi_bps == 54e6);  // 8 m apart
  CHECK(rates[1].bits_per_rb == 248);
  CHECK(rates[1].wifi_bps == 0.0);   // base-station arc carries no WiFi rate
  CHECK(rates[2].bits_per_rb == 0);  // zero CQI, zero rate
}

TEST_CASE("topology file loading") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "radio_topo_test.txt").string();
  {
    std::ofstream out(path);
    out << "# id x y\n1 10 -20\n2 0.5 3\n";
  }
  const auto pos = load_topology_file(path, 2);
  CHECK(pos[0] == Position{10, -20});
  CHECK(pos[1] == Position{0.5, 3});

  CHECK_THROWS_AS(load_topology_file(path, 3), ConfigError);   // user 3 missing
  CHECK_THROWS_AS(load_topology_file("nope.txt", 1), ConfigError);
  std::remove(path.c_str());
}
