#include "wfd/routing_table.hpp"

#include <gtest/gtest.h>

namespace wfd {
namespace {

constexpr NodeId kA{0}, kB{1}, kC{2}, kD{3};

TableAdvert advert(NodeId sender, std::vector<AdvertEntry> entries, bool full = false) {
  return TableAdvert{sender, std::move(entries), full, 0};
}

AdvertEntry entry(NodeId dst, std::uint64_t seq, std::uint32_t hops, std::int64_t lat_us, double energy) {
  return AdvertEntry{dst, seq, hops, Duration{lat_us}, energy};
}

TEST(RoutingTable, LearnNeighborCreatesOneHopEntry) {
  RoutingTable t(kA);
  const auto changed = t.learn_neighbor(kB, 0, {Duration{2002}, 1.5}, SimTime{});
  EXPECT_EQ(changed, std::set<NodeId>{kB});
  const auto* e = t.find(kB);
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->next_hop, kB);
  EXPECT_EQ(e->hop_count, 1u);
  EXPECT_EQ(e->latency, Duration{2002});
  EXPECT_DOUBLE_EQ(e->energy_cost, 1.5);
  EXPECT_TRUE(t.learn_neighbor(kB, 0, {Duration{2002}, 1.5}, SimTime{}).empty());
}

TEST(RoutingTable, MergeAddsLinkMetrics) {
  RoutingTable t(kA);
  t.merge_advert(advert(kB, {entry(kC, 4, 1, 2000, 1.0), entry(kA, 2, 1, 2000, 1.0)}), {Duration{1000}, 2.0},
                 SimTime{});
  const auto* e = t.find(kC);
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->hop_count, 2u);
  EXPECT_EQ(e->latency, Duration{3000});
  EXPECT_DOUBLE_EQ(e->energy_cost, 3.0);
  EXPECT_EQ(t.find(kA), nullptr) << "own entry must never be stored";
}

TEST(RoutingTable, NewerSequenceWinsEvenIfLonger) {
  RoutingTable t(kA);
  t.merge_advert(advert(kB, {entry(kD, 4, 1, 10, 1)}), {Duration{10}, 1}, SimTime{});
  t.merge_advert(advert(kC, {entry(kD, 6, 3, 10, 1)}), {Duration{10}, 1}, SimTime{});
  EXPECT_EQ(t.find(kD)->next_hop, kC);
  EXPECT_EQ(t.find(kD)->hop_count, 4u);
  // An older sequence number is ignored.
  EXPECT_TRUE(t.merge_advert(advert(kB, {entry(kD, 4, 0, 1, 1)}), {Duration{1}, 1}, SimTime{}).empty());
}

TEST(RoutingTable, SameSequencePrefersFewerHopsThenLatency) {
  RoutingTable t(kA);
  t.merge_advert(advert(kB, {entry(kD, 4, 2, 100, 1)}), {Duration{10}, 1}, SimTime{});
  t.merge_advert(advert(kC, {entry(kD, 4, 1, 900, 1)}), {Duration{10}, 1}, SimTime{});
  EXPECT_EQ(t.find(kD)->next_hop, kC);
  RoutingTable u(kA);
  u.merge_advert(advert(kB, {entry(kD, 4, 1, 500, 1)}), {Duration{10}, 1}, SimTime{});
  u.merge_advert(advert(kC, {entry(kD, 4, 1, 100, 1)}), {Duration{10}, 1}, SimTime{});
  EXPECT_EQ(u.find(kD)->next_hop, kC);
}

TEST(RoutingTable, AlternateServesBulkTraffic) {
  RoutingTable t(kA);
  // Via B: fast but expensive. Via C: slow but cheap. Same seq and hops.
  t.merge_advert(advert(kB, {entry(kD, 4, 1, 100, 5.0)}), {Duration{10}, 5.0}, SimTime{});
  t.merge_advert(advert(kC, {entry(kD, 4, 1, 900, 1.0)}), {Duration{10}, 1.0}, SimTime{});
  EXPECT_EQ(t.candidates(kD).size(), 2u);
  EXPECT_EQ(t.select_route(kD, TrafficClass::kRealTime)->next_hop, kB);
  EXPECT_EQ(t.select_route(kD, TrafficClass::kBulk)->next_hop, kC);
}

TEST(RoutingTable, AlternateMustMatchHopCount) {
  RoutingTable t(kA);
  t.merge_advert(advert(kB, {entry(kD, 4, 1, 100, 5.0)}), {Duration{10}, 5.0}, SimTime{});
  t.merge_advert(advert(kC, {entry(kD, 4, 2, 900, 0.1)}), {Duration{10}, 0.1}, SimTime{});
  EXPECT_EQ(t.candidates(kD).size(), 1u);
  EXPECT_EQ(t.select_route(kD, TrafficClass::kBulk)->next_hop, kB);
}

TEST(RoutingTable, DemotedPrimaryBecomesAlternate) {
  RoutingTable t(kA);
  t.merge_advert(advert(kC, {entry(kD, 4, 1, 900, 1.0)}), {Duration{10}, 1.0}, SimTime{});
  t.merge_advert(advert(kB, {entry(kD, 4, 1, 100, 5.0)}), {Duration{10}, 5.0}, SimTime{});
  EXPECT_EQ(t.find(kD)->next_hop, kB);
  EXPECT_EQ(t.select_route(kD, TrafficClass::kBulk)->next_hop, kC);
}

TEST(RoutingTable, InvalidateMarksOddSequenceAndInfinity) {
  RoutingTable t(kA);
  t.learn_neighbor(kB, 2, {Duration{10}, 1}, SimTime{});
  t.merge_advert(advert(kB, {entry(kC, 4, 1, 10, 1)}), {Duration{10}, 1}, SimTime{});
  const auto changed = t.invalidate_next_hop(kB, sim_time_us(5));
  EXPECT_EQ(changed, (std::set<NodeId>{kB, kC}));
  EXPECT_EQ(t.find(kC)->seq_no, 5u);
  EXPECT_EQ(t.find(kC)->hop_count, kInfiniteHops);
  EXPECT_FALSE(t.find(kC)->valid());
  EXPECT_FALSE(t.select_route(kC, TrafficClass::kRealTime).has_value());
  // The destination's next even sequence number restores the route.
  t.merge_advert(advert(kD, {entry(kC, 6, 1, 10, 1)}), {Duration{10}, 1}, SimTime{});
  EXPECT_TRUE(t.find(kC)->valid());
  EXPECT_EQ(t.find(kC)->next_hop, kD);
}

TEST(RoutingTable, InvalidationPropagatesThroughAdverts) {
  RoutingTable t(kA);
  t.merge_advert(advert(kB, {entry(kD, 4, 1, 10, 1)}), {Duration{10}, 1}, SimTime{});
  t.merge_advert(advert(kB, {entry(kD, 5, kInfiniteHops, 10, 1)}), {Duration{10}, 1}, SimTime{});
  EXPECT_FALSE(t.find(kD)->valid());
  EXPECT_EQ(t.find(kD)->hop_count, kInfiniteHops);
}

TEST(RoutingTable, FullDumpAdvancesOwnSequence) {
  RoutingTable t(kA);
  t.learn_neighbor(kB, 0, {Duration{10}, 1}, SimTime{});
  const auto full = t.make_advert(true);
  EXPECT_TRUE(full.full_dump);
  ASSERT_EQ(full.entries.size(), 2u);
  EXPECT_EQ(full.entries[0], (AdvertEntry{kA, 2, 0, Duration{0}, 0.0}));
  EXPECT_EQ(t.self_seq(), 2u);
  EXPECT_TRUE(t.dirty().empty());
}

TEST(RoutingTable, IncrementalCarriesOnlyChangedEntries) {
  RoutingTable t(kA);
  t.learn_neighbor(kB, 0, {Duration{10}, 1}, SimTime{});
  t.learn_neighbor(kC, 0, {Duration{10}, 1}, SimTime{});
  EXPECT_EQ(t.make_advert(false).entries.size(), 2u);
  EXPECT_TRUE(t.make_advert(false).entries.empty());
  t.merge_advert(advert(kC, {entry(kD, 2, 1, 10, 1)}), {Duration{10}, 1}, SimTime{});
  const auto inc = t.make_advert(false);
  ASSERT_EQ(inc.entries.size(), 1u);
  EXPECT_EQ(inc.entries[0].destination, kD);
}

TEST(RoutingTable, SequenceOnlyRefreshIsNotReadvertised) {
  RoutingTable t(kA);
  t.merge_advert(advert(kB, {entry(kD, 2, 1, 10, 1)}), {Duration{10}, 1}, SimTime{});
  t.make_advert(false);
  const auto changed = t.merge_advert(advert(kB, {entry(kD, 4, 1, 10, 1)}), {Duration{10}, 1}, SimTime{});
  EXPECT_TRUE(changed.empty());
  EXPECT_EQ(t.find(kD)->seq_no, 4u);
  EXPECT_TRUE(t.make_advert(false).entries.empty());
}

}  // namespace
}  // namespace wfd
