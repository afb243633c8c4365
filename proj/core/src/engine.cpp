#include "wfd/engine.hpp"

#include <utility>

namespace wfd {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kTimer: return "timer";
    case EventKind::kFrameArrival: return "frame";
    case EventKind::kAdvertTick: return "advert";
    case EventKind::kAppSend: return "app_send";
    case EventKind::kMobilityStep: return "move";
  }
  return "unknown";
}

EventHandle Engine::schedule(Duration delay, EventKind kind, NodeId target, Handler handler) {
  if (delay < Duration::zero()) throw std::invalid_argument("schedule: negative delay");
  return schedule_at(now_ + delay, kind, target, std::move(handler));
}

EventHandle Engine::schedule_at(SimTime at, EventKind kind, NodeId target, Handler handler) {
  if (finished_) throw std::logic_error("schedule: engine is finished");
  if (at < now_) throw std::invalid_argument("schedule: event time is in the past");
  const std::uint64_t seq = next_seq_++;
  queue_.emplace(Key{to_us(at), seq}, Entry{kind, target, std::move(handler)});
  return EventHandle{at, seq};
}

bool Engine::cancel(EventHandle& handle) {
  if (!handle.valid()) return false;
  const bool erased = queue_.erase(Key{to_us(handle.fire_at_), handle.seq_}) > 0;
  handle = EventHandle{};
  return erased;
}

bool Engine::step(SimTime limit) {
  if (queue_.empty()) return false;
  auto it = queue_.begin();
  if (it->first.fire_at_us > to_us(limit)) return false;

  auto node = queue_.extract(it);
  const Key key = node.key();
  if (key < last_popped_) throw std::logic_error("engine: event order violated");
  last_popped_ = key;

  now_ = sim_time_us(key.fire_at_us);
  Entry& entry = node.mapped();
  if (observer_) observer_(EventInfo{now_, key.seq, entry.kind, entry.target});
  ++processed_;
  entry.handler();
  return true;
}

std::size_t Engine::run_until(SimTime t_end) {
  if (t_end < now_) throw std::invalid_argument("run_until: t_end is before now()");
  std::size_t steps = 0;
  while (!finished_ && step(t_end)) ++steps;
  now_ = t_end;
  return steps;
}

std::size_t Engine::run() {
  std::size_t steps = 0;
  while (!finished_ && step(SimTime::max())) ++steps;
  return steps;
}

}  // namespace wfd
