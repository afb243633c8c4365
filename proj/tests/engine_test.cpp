#include "wfd/engine.hpp"

#include <gtest/gtest.h>

#include <vector>

namespace wfd {
namespace {

TEST(Engine, FiresInTimeThenScheduleOrder) {
  Engine e;
  std::vector<int> order;
  e.schedule(Duration{20}, EventKind::kTimer, NodeId{0}, [&] { order.push_back(3); });
  e.schedule(Duration{10}, EventKind::kTimer, NodeId{0}, [&] { order.push_back(1); });
  e.schedule(Duration{10}, EventKind::kTimer, NodeId{0}, [&] { order.push_back(2); });
  e.run();
  EXPECT_EQ(order, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(e.processed(), 3u);
}

TEST(Engine, RunUntilStopsAtBoundaryInclusive) {
  Engine e;
  int fired = 0;
  e.schedule_at(sim_time_us(100), EventKind::kTimer, NodeId{0}, [&] { ++fired; });
  e.schedule_at(sim_time_us(101), EventKind::kTimer, NodeId{0}, [&] { ++fired; });
  EXPECT_EQ(e.run_until(sim_time_us(100)), 1u);
  EXPECT_EQ(fired, 1);
  EXPECT_EQ(e.now(), sim_time_us(100));
  EXPECT_EQ(e.pending(), 1u);
}

TEST(Engine, CancelPreventsFiring) {
  Engine e;
  bool fired = false;
  auto h = e.schedule(Duration{5}, EventKind::kTimer, NodeId{0}, [&] { fired = true; });
  EXPECT_TRUE(e.cancel(h));
  EXPECT_FALSE(e.cancel(h));
  e.run();
  EXPECT_FALSE(fired);
}

TEST(Engine, CancelAfterFireReturnsFalse) {
  Engine e;
  auto h = e.schedule(Duration{5}, EventKind::kTimer, NodeId{0}, [] {});
  e.run();
  EXPECT_FALSE(e.cancel(h));
  EventHandle empty;
  EXPECT_FALSE(e.cancel(empty));
}

TEST(Engine, HandlersMayScheduleAtCurrentTime) {
  Engine e;
  std::vector<int> order;
  e.schedule(Duration{1}, EventKind::kTimer, NodeId{0}, [&] {
    order.push_back(1);
    e.schedule(Duration{0}, EventKind::kTimer, NodeId{0}, [&] { order.push_back(3); });
  });
  e.schedule(Duration{1}, EventKind::kTimer, NodeId{0}, [&] { order.push_back(2); });
  e.run();
  EXPECT_EQ(order, (std::vector<int>{1, 2, 3}));
}

TEST(Engine, RejectsPastScheduling) {
  Engine e;
  e.run_until(sim_time_us(50));
  EXPECT_ANY_THROW(e.schedule_at(sim_time_us(10), EventKind::kTimer, NodeId{0}, [] {}));
  EXPECT_ANY_THROW(e.schedule(Duration{-1}, EventKind::kTimer, NodeId{0}, [] {}));
}

TEST(Engine, FinishStopsProcessing) {
  Engine e;
  int fired = 0;
  e.schedule(Duration{10}, EventKind::kTimer, NodeId{0}, [&] { ++fired; });
  e.finish();
  EXPECT_EQ(e.run_until(sim_time_us(100)), 0u);
  EXPECT_EQ(fired, 0);
}

TEST(Engine, DispatchObserverSeesKindAndTarget) {
  Engine e;
  std::vector<EventInfo> seen;
  e.set_dispatch_observer([&](const EventInfo& i) { seen.push_back(i); });
  e.schedule(Duration{7}, EventKind::kAdvertTick, NodeId{4}, [] {});
  e.run();
  ASSERT_EQ(seen.size(), 1u);
  EXPECT_EQ(seen[0].kind, EventKind::kAdvertTick);
  EXPECT_EQ(seen[0].target, NodeId{4});
  EXPECT_EQ(seen[0].fire_at, sim_time_us(7));
}

}  // namespace
}  // namespace wfd
