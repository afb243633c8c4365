#include "wfd/linklayer.hpp"

#include <gtest/gtest.h>

#include <any>
#include <vector>

#include "wfd/engine.hpp"
#include "wfd/random.hpp"
#include "wfd/topology.hpp"
#include "wfd/trace.hpp"

namespace wfd {
namespace {

struct Recorder : LinkObserver {
  std::vector<std::pair<NodeId, NodeId>> ups, downs;
  std::vector<std::pair<NodeId, std::uint64_t>> frames;
  std::vector<NodeId> lost;
  void on_link_up(NodeId n, NodeId p) override { ups.emplace_back(n, p); }
  void on_link_down(NodeId n, NodeId p) override { downs.emplace_back(n, p); }
  void on_frame(NodeId at, const Frame& f) override { frames.emplace_back(at, f.size_bits); }
  void on_frame_lost(const Frame&, NodeId intended) override { lost.push_back(intended); }
};

class LinkLayerTest : public ::testing::Test {
 protected:
  NodeId add(const std::string& name, Position pos, int intent, int channel = 6) {
    const NodeId id = topo.add_node(pos);
    trace.register_node(id, name);
    link->add_device(id, intent, channel);
    return id;
  }

  void make(LinkConfig cfg = {}) {
    link = std::make_unique<LinkLayer>(engine, topo, trace, random, cfg);
    link->add_observer(&rec);
  }

  // Runs discovery between a and b and negotiates with a fixed tie-breaker.
  void pair_up(NodeId a, NodeId b, bool tie = false) {
    link->want_peer(a, b);
    link->want_peer(b, a);
    engine.run_until(engine.now() + std::chrono::seconds(11));
    ASSERT_TRUE(link->discovered_peers(a).contains(b));
    link->negotiate_go(a, b, tie);
    engine.run_until(engine.now() + std::chrono::seconds(1));
  }

  std::size_t count(EventClass cls, std::string_view action) const {
    std::size_t n = 0;
    for (const auto& r : trace.records()) n += r.event_class == cls && r.field_or("action", "") == action;
    return n;
  }

  void SetUp() override { make(); }

  Engine engine;
  Topology topo;
  Trace trace;
  RandomSource random{1};
  Recorder rec;
  std::unique_ptr<LinkLayer> link;
};

TEST(GoNegotiation, ResolveRole) {
  EXPECT_EQ(resolve_go_role({10, false}, {3, false}), GoRole::kInitiator);
  EXPECT_EQ(resolve_go_role({3, true}, {10, false}), GoRole::kResponder);
  EXPECT_EQ(resolve_go_role({7, true}, {7, false}), GoRole::kInitiator);
  EXPECT_EQ(resolve_go_role({7, false}, {7, false}), GoRole::kResponder);
  EXPECT_EQ(resolve_go_role({15, true}, {15, false}), std::nullopt);
  EXPECT_EQ(resolve_go_role({15, false}, {14, false}), GoRole::kInitiator);
}

TEST_F(LinkLayerTest, AddDeviceValidatesParams) {
  const NodeId a = topo.add_node({0, 0});
  EXPECT_THROW(link->add_device(a, 16), LinkError);
  EXPECT_THROW(link->add_device(a, 7, 3), LinkError);
  link->add_device(a, 7);
  EXPECT_THROW(link->add_device(a, 7), LinkError);
  EXPECT_THROW(link->add_device(NodeId{9}, 7), UnknownNodeError);
}

TEST_F(LinkLayerTest, DiscoveryFindsPeerAndReturnsToIdle) {
  const NodeId a = add("A", {0, 0}, 7);
  const NodeId b = add("B", {100, 0}, 7);
  link->want_peer(a, b);
  link->want_peer(b, a);
  EXPECT_TRUE(link->discovering(a));
  engine.run_until(sim_time_us(10'000'000));
  EXPECT_TRUE(link->discovered_peers(a).contains(b));
  EXPECT_TRUE(link->discovered_peers(b).contains(a));
  EXPECT_EQ(link->state(a), DeviceState::kIdle);
  EXPECT_EQ(link->state(b), DeviceState::kIdle);
  EXPECT_EQ(count(EventClass::kDiscovery, "complete"), 2u);
}

TEST_F(LinkLayerTest, DifferentListenChannelsTimeOut) {
  const NodeId a = add("A", {0, 0}, 7, 1);
  const NodeId b = add("B", {100, 0}, 7, 11);
  link->want_peer(a, b);
  link->want_peer(b, a);
  engine.run_until(sim_time_us(12'000'000));
  EXPECT_TRUE(link->discovered_peers(a).empty());
  EXPECT_EQ(count(EventClass::kDiscovery, "timeout"), 2u);
  EXPECT_EQ(link->state(a), DeviceState::kIdle);
}

TEST_F(LinkLayerTest, OutOfRangeNeverDiscovers) {
  const NodeId a = add("A", {0, 0}, 7);
  const NodeId b = add("B", {500, 0}, 7);
  link->want_peer(a, b);
  link->want_peer(b, a);
  engine.run_until(sim_time_us(12'000'000));
  EXPECT_TRUE(link->discovered_peers(b).empty());
}

TEST_F(LinkLayerTest, NegotiateRequiresDiscovery) {
  const NodeId a = add("A", {0, 0}, 7);
  const NodeId b = add("B", {100, 0}, 7);
  EXPECT_THROW(link->negotiate_go(a, b), LinkError);
  EXPECT_THROW(link->negotiate_go(a, a), LinkError);
}

TEST_F(LinkLayerTest, HigherIntentBecomesOwner) {
  const NodeId a = add("A", {0, 0}, 2);
  const NodeId b = add("B", {100, 0}, 12);
  pair_up(a, b, true);
  ASSERT_TRUE(link->owned_group(b).has_value());
  EXPECT_EQ(link->state(b), DeviceState::kGroupOwner);
  EXPECT_EQ(link->state(a), DeviceState::kGroupClient);
  const Group* g = link->find_group(*link->owned_group(b));
  ASSERT_NE(g, nullptr);
  EXPECT_EQ(g->addresses.at(b), 1);
  EXPECT_EQ(g->addresses.at(a), 2);
  EXPECT_EQ(link->link_peers(a), std::vector<NodeId>{b});
  EXPECT_EQ(rec.ups.size(), 2u) << "one notification per endpoint";
}

TEST_F(LinkLayerTest, TieBreakerDecidesEqualIntent) {
  const NodeId a = add("A", {0, 0}, 7);
  const NodeId b = add("B", {100, 0}, 7);
  pair_up(a, b, true);
  EXPECT_TRUE(link->owned_group(a).has_value());
  EXPECT_FALSE(link->owned_group(b).has_value());
}

TEST_F(LinkLayerTest, BothFifteenIsConflict) {
  const NodeId a = add("A", {0, 0}, 15);
  const NodeId b = add("B", {100, 0}, 15);
  pair_up(a, b, true);
  EXPECT_TRUE(link->groups().empty());
  EXPECT_EQ(link->state(a), DeviceState::kIdle);
  EXPECT_EQ(link->state(b), DeviceState::kIdle);
  EXPECT_EQ(count(EventClass::kNegotiation, "failed"), 1u);
}

TEST_F(LinkLayerTest, ClientsTalkOnlyToOwner) {
  const NodeId go = add("GO", {0, 0}, 12);
  const NodeId c1 = add("C1", {80, 0}, 2);
  const NodeId c2 = add("C2", {-80, 0}, 2);
  pair_up(c1, go);
  link->join_group(c2, *link->owned_group(go));
  engine.run_until(engine.now() + std::chrono::seconds(1));
  rec.frames.clear();
  EXPECT_TRUE(link->can_deliver(c1, go));
  EXPECT_FALSE(link->can_deliver(c1, c2));
  EXPECT_EQ(link->unicast(c1, c2, 100, {}).status, LinkStatus::kForbiddenByRole);
  EXPECT_EQ(link->unicast(c1, go, 100, {}).status, LinkStatus::kOk);

  // Client broadcast reaches only the owner; owner broadcast reaches everyone.
  EXPECT_EQ(link->broadcast(c1, 100, {}).recipients, std::vector<NodeId>{go});
  EXPECT_EQ(link->broadcast(go, 100, {}).recipients, (std::vector<NodeId>{c1, c2}));
  engine.run_until(engine.now() + std::chrono::seconds(1));
  EXPECT_EQ(rec.frames.size(), 4u);
}

TEST_F(LinkLayerTest, UngroupedUnicastHasNoLink) {
  const NodeId a = add("A", {0, 0}, 7);
  const NodeId b = add("B", {10, 0}, 7);
  EXPECT_EQ(link->unicast(a, b, 8, {}).status, LinkStatus::kNoLink);
}

TEST_F(LinkLayerTest, JoinErrors) {
  const NodeId go = add("GO", {0, 0}, 12);
  const NodeId c1 = add("C1", {80, 0}, 2);
  const NodeId far = add("FAR", {900, 0}, 2);
  pair_up(c1, go);
  const GroupId g = *link->owned_group(go);
  EXPECT_THROW(link->join_group(c1, g), LinkError);
  EXPECT_THROW(link->join_group(far, g), LinkError);
  EXPECT_THROW(link->join_group(far, 999), LinkError);
}

TEST_F(LinkLayerTest, BridgeLinksOwners) {
  const NodeId go1 = add("GO1", {0, 0}, 12);
  const NodeId c1 = add("C1", {-80, 0}, 2);
  const NodeId go2 = add("GO2", {150, 0}, 12);
  const NodeId c2 = add("C2", {230, 0}, 2);
  pair_up(c1, go1);
  pair_up(c2, go2);
  link->bridge_attach(go1, *link->owned_group(go2));
  EXPECT_TRUE(link->can_deliver(go1, go2));
  EXPECT_EQ(link->link_peers(go2), (std::vector<NodeId>{go1, c2}));
  EXPECT_THROW(link->bridge_attach(c1, *link->owned_group(go2)), LinkError);
  EXPECT_THROW(link->bridge_attach(go1, *link->owned_group(go2)), LinkError);
}

TEST_F(LinkLayerTest, BridgingDisabledByPolicy) {
  LinkConfig cfg;
  cfg.bridging = BridgingPolicy::kNone;
  make(cfg);
  const NodeId go1 = add("GO1", {0, 0}, 12);
  const NodeId c1 = add("C1", {-80, 0}, 2);
  const NodeId go2 = add("GO2", {150, 0}, 12);
  const NodeId c2 = add("C2", {230, 0}, 2);
  pair_up(c1, go1);
  pair_up(c2, go2);
  try {
    link->bridge_attach(go1, *link->owned_group(go2));
    FAIL() << "expected LinkError";
  } catch (const LinkError& e) {
    EXPECT_EQ(e.code(), LinkErrorCode::kPolicyDisabled);
  }
}

TEST_F(LinkLayerTest, KeepaliveEvictsAfterMissLimit) {
  const NodeId go = add("GO", {0, 0}, 12);
  const NodeId c1 = add("C1", {80, 0}, 2);
  const NodeId c2 = add("C2", {-80, 0}, 2);
  pair_up(c1, go);
  link->join_group(c2, *link->owned_group(go));
  for (const auto& ch : topo.apply_move(c2, {-900, 0})) link->handle_range_change(ch);
  engine.run_until(engine.now() + std::chrono::milliseconds(1500));
  EXPECT_TRUE(link->client_group(c2).has_value());
  engine.run_until(engine.now() + std::chrono::seconds(2));
  EXPECT_FALSE(link->client_group(c2).has_value());
  EXPECT_EQ(count(EventClass::kConnect, "keepalive_miss"), 3u);
  ASSERT_FALSE(rec.downs.empty());
  EXPECT_TRUE(link->owned_group(go).has_value());
}

TEST_F(LinkLayerTest, FrameToDepartedPeerIsLost) {
  const NodeId go = add("GO", {0, 0}, 12);
  const NodeId c1 = add("C1", {80, 0}, 2);
  pair_up(c1, go);
  ASSERT_EQ(link->unicast(go, c1, 8000, {}).status, LinkStatus::kOk);
  topo.apply_move(c1, {900, 0});
  engine.run_until(engine.now() + std::chrono::milliseconds(100));
  EXPECT_EQ(rec.lost, std::vector<NodeId>{c1});
  const auto& last = trace.records().back();
  EXPECT_EQ(last.event_class, EventClass::kDrop);
  EXPECT_EQ(last.field_or("reason", ""), "Lost");
}

TEST_F(LinkLayerTest, FrameFilterDuplicatesAndDrops) {
  const NodeId go = add("GO", {0, 0}, 12);
  const NodeId c1 = add("C1", {80, 0}, 2);
  pair_up(c1, go);
  rec.frames.clear();
  link->set_frame_filter([](const Frame&, NodeId) { return 2; });
  link->unicast(go, c1, 64, {});
  engine.run_until(engine.now() + std::chrono::milliseconds(100));
  EXPECT_EQ(rec.frames.size(), 2u);
}

TEST_F(LinkLayerTest, FrameLatencyMatchesTopology) {
  const NodeId go = add("GO", {0, 0}, 12);
  const NodeId c1 = add("C1", {80, 0}, 2);
  pair_up(c1, go);
  rec.frames.clear();
  const SimTime sent = engine.now();
  link->unicast(go, c1, 8'000'000, {});
  engine.run_until(sent + std::chrono::microseconds(33'999));
  EXPECT_TRUE(rec.frames.empty());
  engine.run_until(sent + std::chrono::microseconds(34'000));
  EXPECT_EQ(rec.frames.size(), 1u);
}

TEST_F(LinkLayerTest, OwnerLeavingDissolvesGroup) {
  const NodeId go = add("GO", {0, 0}, 12);
  const NodeId c1 = add("C1", {80, 0}, 2);
  pair_up(c1, go);
  link->leave_group(go);
  EXPECT_TRUE(link->groups().empty());
  EXPECT_EQ(link->state(c1), DeviceState::kIdle);
  EXPECT_EQ(count(EventClass::kGroup, "dissolve"), 1u);
}

}  // namespace
}  // namespace wfd
