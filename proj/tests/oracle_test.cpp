// Sanity checks on the brute-force oracles themselves.
#include "support/oracle.hpp"

#include <gtest/gtest.h>

namespace wfd::testing {
namespace {

// Diamond 0-1-3, 0-2-3 plus a long way round 0-4-5-3.
OracleGraph diamond() {
  OracleGraph g;
  g.n = 6;
  g.adj = {{1, 2, 4}, {0, 3}, {0, 3}, {1, 2, 5}, {0, 5}, {4, 3}};
  g.latency_us.assign(6, std::vector<std::int64_t>(6, 1));
  g.latency_us[0][1] = 10;
  g.latency_us[1][3] = 10;
  g.latency_us[0][2] = 50;
  g.latency_us[2][3] = 50;
  g.cost = {1, 9, 2, 1, 0.1, 0.1};
  return g;
}

TEST(Oracle, SimplePathsEnumeratesAll) { EXPECT_EQ(simple_paths(diamond(), 0, 3).size(), 3u); }

TEST(Oracle, HopDistance) {
  EXPECT_EQ(hop_distance(diamond(), 0, 3), 2u);
  OracleGraph split;
  split.n = 2;
  split.adj = {{}, {}};
  EXPECT_FALSE(hop_distance(split, 0, 1).has_value());
  EXPECT_FALSE(connected(split));
}

TEST(Oracle, RealTimeIgnoresLongerButFasterPaths) {
  // 0-4-5-3 has latency 3 but three hops.
  EXPECT_EQ(realtime_oracle(diamond(), 0, 3), 20);
}

TEST(Oracle, BulkCountsEveryNodeAfterTheSource) {
  const auto g = diamond();
  EXPECT_DOUBLE_EQ(path_metric(g, {0, 2, 3}).energy, 3.0);
  EXPECT_DOUBLE_EQ(*bulk_oracle(g, 0, 3), 3.0);
  EXPECT_DOUBLE_EQ(*min_energy_min_hop(g, 0, 3), 3.0);
  EXPECT_DOUBLE_EQ(*bulk_oracle(g, 0, 1), 9.0);
}

TEST(Oracle, Airtime) {
  EXPECT_EQ(airtime_us(256, 250'000'000), 2);
  EXPECT_EQ(airtime_us(8'000'000, 250'000'000), 32'000);
}

}  // namespace
}  // namespace wfd::testing
