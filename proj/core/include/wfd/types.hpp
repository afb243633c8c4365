#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>

namespace wfd {

// Virtual time is integer microseconds since simulation start.
using Duration = std::chrono::microseconds;

struct SimClock {
  using rep = Duration::rep;
  using period = Duration::period;
  using duration = Duration;
  using time_point = std::chrono::time_point<SimClock, Duration>;
  static constexpr bool is_steady = true;
};

using SimTime = SimClock::time_point;

constexpr std::int64_t to_us(SimTime t) { return t.time_since_epoch().count(); }
constexpr std::int64_t to_us(Duration d) { return d.count(); }
constexpr SimTime sim_time_us(std::int64_t us) { return SimTime{Duration{us}}; }

struct NodeId {
  std::uint32_t value = 0;

  constexpr auto operator<=>(const NodeId&) const = default;
};

constexpr NodeId kInvalidNode{std::numeric_limits<std::uint32_t>::max()};

using GroupId = std::uint32_t;

}  // namespace wfd

template <>
struct std::hash<wfd::NodeId> {
  std::size_t operator()(wfd::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
