#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string_view>

#include "wfd/types.hpp"

namespace wfd {

enum class EventKind : std::uint8_t {
  kTimer,
  kFrameArrival,
  kAdvertTick,
  kAppSend,
  kMobilityStep,
};

std::string_view to_string(EventKind kind);

// Opaque cancellation token. Default-constructed handles refer to nothing.
class EventHandle {
 public:
  EventHandle() = default;

  bool valid() const { return seq_ != 0; }

 private:
  friend class Engine;
  EventHandle(SimTime at, std::uint64_t seq) : fire_at_(at), seq_(seq) {}

  SimTime fire_at_{};
  std::uint64_t seq_ = 0;
};

struct EventInfo {
  SimTime fire_at;
  std::uint64_t seq;
  EventKind kind;
  NodeId target;
};

// Deterministic discrete-event loop. Events are totally ordered by
// (fire_at, seq); seq is assigned at schedule time, so events sharing a
// timestamp fire in the order they were scheduled.
class Engine {
 public:
  using Handler = std::function<void()>;

  Engine() = default;
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  SimTime now() const { return now_; }

  EventHandle schedule(Duration delay, EventKind kind, NodeId target, Handler handler);
  EventHandle schedule_at(SimTime at, EventKind kind, NodeId target, Handler handler);

  // Returns false when the event already fired, was cancelled, or never existed.
  bool cancel(EventHandle& handle);

  // Processes every event with fire_at <= t_end. After return now() == t_end.
  std::size_t run_until(SimTime t_end);

  // Drains the queue completely.
  std::size_t run();

  // Once finished, further scheduling is rejected and run_until is a no-op.
  void finish() { finished_ = true; }
  bool finished() const { return finished_; }

  std::size_t pending() const { return queue_.size(); }
  std::uint64_t processed() const { return processed_; }

  // Called just before each handler runs.
  void set_dispatch_observer(std::function<void(const EventInfo&)> observer) {
    observer_ = std::move(observer);
  }

 private:
  struct Key {
    std::int64_t fire_at_us;
    std::uint64_t seq;
    auto operator<=>(const Key&) const = default;
  };
  struct Entry {
    EventKind kind;
    NodeId target;
    Handler handler;
  };

  bool step(SimTime limit);

  SimTime now_{};
  std::uint64_t next_seq_ = 1;
  std::uint64_t processed_ = 0;
  bool finished_ = false;
  Key last_popped_{-1, 0};
  std::map<Key, Entry> queue_;
  std::function<void(const EventInfo&)> observer_;
};

}  // namespace wfd
