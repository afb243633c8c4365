#include "wfd/routing.hpp"

#include <algorithm>

namespace wfd {
namespace {

constexpr std::uint64_t kDiscoveryRequestBits = 256;
constexpr std::uint64_t kDiscoveryResponseBits = 320;
constexpr std::uint64_t kAdvertHeaderBits = 128;
constexpr std::uint64_t kAdvertEntryBits = 192;
constexpr std::uint64_t kRouteErrorBits = 256;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string hops_text(std::uint32_t hops) { return hops == kInfiniteHops ? "inf" : std::to_string(hops); }

std::string join_names(const Trace& trace, const std::set<NodeId>& nodes) {
  if (nodes.empty()) return "-";
  std::string out;
  for (NodeId n : nodes) {
    if (!out.empty()) out += ',';
    out += trace.name(n);
  }
  return out;
}

// dest/seq/hops/latency_us/energy per entry, comma separated.
std::string advert_entries_text(const Trace& trace, const TableAdvert& advert) {
  if (advert.entries.empty()) return "-";
  std::string out;
  for (const auto& e : advert.entries) {
    if (!out.empty()) out += ',';
    out += trace.name(e.destination);
    out += '/' + std::to_string(e.seq_no);
    out += '/' + hops_text(e.hop_count);
    out += '/' + std::to_string(e.latency.count());
    out += '/' + format_double(e.energy_cost);
  }
  return out;
}

}  // namespace

std::uint64_t message_bits(const RoutingMessage& msg) {
  return std::visit(Overloaded{
                        [](const DiscoveryRequest&) { return kDiscoveryRequestBits; },
                        [](const DiscoveryResponse&) { return kDiscoveryResponseBits; },
                        [](const TableAdvert& a) { return kAdvertHeaderBits + kAdvertEntryBits * a.entries.size(); },
                        [](const Packet& p) { return std::max<std::uint64_t>(p.payload_bits, 1); },
                        [](const RouteError&) { return kRouteErrorBits; },
                    },
                    msg);
}

std::string_view message_kind(const RoutingMessage& msg) {
  return std::visit(Overloaded{
                        [](const DiscoveryRequest&) { return std::string_view("disc_req"); },
                        [](const DiscoveryResponse&) { return std::string_view("disc_resp"); },
                        [](const TableAdvert&) { return std::string_view("advert"); },
                        [](const Packet&) { return std::string_view("data"); },
                        [](const RouteError&) { return std::string_view("rerr"); },
                    },
                    msg);
}

std::string_view to_string(SendStatus s) {
  switch (s) {
    case SendStatus::kOk: return "Ok";
    case SendStatus::kNoLink: return "NoLink";
    case SendStatus::kForbiddenByRole: return "ForbiddenByRole";
    case SendStatus::kNotInGroup: return "NotInGroup";
    case SendStatus::kLost: return "Lost";
    case SendStatus::kUnsupported: return "Unsupported";
  }
  return "Unknown";
}

std::string_view to_string(DropReason r) {
  switch (r) {
    case DropReason::kNoRoute: return "NoRoute";
    case DropReason::kTtlExpired: return "TtlExpired";
    case DropReason::kLost: return "Lost";
    case DropReason::kForbiddenByRole: return "ForbiddenByRole";
    case DropReason::kUnsupported: return "Unsupported";
    case DropReason::kDuplicate: return "Duplicate";
    case DropReason::kReportTimeout: return "ReportTimeout";
  }
  return "Unknown";
}

std::string flow_id(const Trace& trace, NodeId src, std::uint64_t app_seq) {
  return trace.name(src) + "#" + std::to_string(app_seq);
}

Fields packet_fields(const Trace& trace, const Packet& pkt) {
  Fields f;
  f.add("kind", "data")
      .add("flow", flow_id(trace, pkt.src, pkt.app_seq))
      .add("src", trace.name(pkt.src))
      .add("dst", trace.name(pkt.dst))
      .add("seq", pkt.app_seq)
      .add("ttl", pkt.ttl)
      .add("class", to_string(pkt.traffic_class))
      .add("payload", pkt.payload_bits);
  return f;
}

// --- DiscoveryManager ----------------------------------------------------------

DiscoveryManager::DiscoveryManager(NodeId self, double energy_cost, const RoutingConfig& config, RoutingTable& table,
                                   Engine& engine, Trace& trace, MessageTransport& transport)
    : self_(self),
      energy_cost_(energy_cost),
      config_(config),
      table_(table),
      engine_(engine),
      trace_(trace),
      transport_(transport) {}

void DiscoveryManager::trace(EventClass cls, Fields fields) {
  trace_.record(engine_.now(), self_, cls, std::move(fields));
}

void DiscoveryManager::broadcast_discovery_request() {
  trace(EventClass::kDiscovery, std::move(Fields{}.add("action", "request")));
  transport_.broadcast(self_, DiscoveryRequest{self_, engine_.now()});
}

void DiscoveryManager::on_request(NodeId from, const DiscoveryRequest& req) {
  trace(EventClass::kDiscovery,
        std::move(Fields{}.add("action", "response").add("peer", trace_.name(from)).add("seq", table_.self_seq())));
  transport_.send(self_, from, DiscoveryResponse{self_, req.requester, table_.self_seq(), energy_cost_, req.sent_at});
}

void DiscoveryManager::on_response(NodeId from, const DiscoveryResponse& resp) {
  if (resp.requester != self_) return;
  const Duration rtt = engine_.now() - resp.request_sent_at;
  const LinkMetrics metrics{rtt / 2, resp.energy_cost};
  links_[from] = metrics;
  const auto changed = table_.learn_neighbor(from, resp.seq_no, metrics, engine_.now());
  trace(EventClass::kDiscovery, std::move(Fields{}
                                              .add("action", "entry")
                                              .add("peer", trace_.name(from))
                                              .add("seq", resp.seq_no)
                                              .add("lat_us", metrics.latency)
                                              .add("energy", metrics.energy_cost)
                                              .add("changed", join_names(trace_, changed))));
}

void DiscoveryManager::on_advert(NodeId from, const TableAdvert& advert) {
  auto link = links_.find(from);
  if (link == links_.end()) {
    trace(EventClass::kDrop,
          std::move(Fields{}.add("kind", "advert").add("reason", "NonNeighbor").add("from", trace_.name(from))));
    return;
  }
  const auto changed = table_.merge_advert(advert, link->second, engine_.now());
  trace(EventClass::kAdvert, std::move(Fields{}
                                           .add("action", "rx")
                                           .add("from", trace_.name(from))
                                           .add("tick", advert.tick)
                                           .add("full", advert.full_dump)
                                           .add("n", advert.entries.size())
                                           .add("changed", join_names(trace_, changed))));
}

void DiscoveryManager::advert_tick() {
  ++ticks_;
  const bool full = config_.full_dump_interval > 0 && ticks_ % config_.full_dump_interval == 0;
  if (!transport_.has_links(self_)) return;
  TableAdvert advert = table_.make_advert(full);
  advert.tick = ticks_;
  trace(EventClass::kAdvert, std::move(Fields{}
                                           .add("action", "tx")
                                           .add("tick", ticks_)
                                           .add("full", full)
                                           .add("self_seq", table_.self_seq())
                                           .add("n", advert.entries.size())
                                           .add("entries", advert_entries_text(trace_, advert))));
  transport_.broadcast(self_, advert);
  // Link latency estimates are refreshed alongside every full dump.
  if (full) broadcast_discovery_request();
}

void DiscoveryManager::start_adverts(SimTime first_tick) {
  engine_.cancel(advert_timer_);
  advert_timer_ = engine_.schedule_at(first_tick, EventKind::kAdvertTick, self_, [this] {
    advert_tick();
    start_adverts(engine_.now() + config_.advert_period);
  });
}

void DiscoveryManager::stop_adverts() { engine_.cancel(advert_timer_); }

void DiscoveryManager::on_link_up(NodeId /*peer*/) {
  // Several links can come up in the same instant; one request covers them.
  if (request_pending_) return;
  request_pending_ = true;
  engine_.schedule(Duration::zero(), EventKind::kTimer, self_, [this] {
    request_pending_ = false;
    if (transport_.has_links(self_)) broadcast_discovery_request();
  });
}

void DiscoveryManager::on_link_down(NodeId peer) {
  links_.erase(peer);
  invalidate_neighbor(peer);
}

std::set<NodeId> DiscoveryManager::invalidate_neighbor(NodeId lost_peer) {
  const auto changed = table_.invalidate_next_hop(lost_peer, engine_.now());
  trace(EventClass::kAdvert, std::move(Fields{}
                                           .add("action", "invalidate")
                                           .add("peer", trace_.name(lost_peer))
                                           .add("changed", join_names(trace_, changed))));
  return changed;
}

// --- RoutingManager ------------------------------------------------------------

RoutingManager::RoutingManager(NodeId self, const RoutingConfig& config, RoutingTable& table,
                               DiscoveryManager& discovery, Engine& engine, Trace& trace, MessageTransport& transport)
    : self_(self),
      config_(config),
      table_(table),
      discovery_(discovery),
      engine_(engine),
      trace_(trace),
      transport_(transport) {}

std::optional<NodeId> RoutingManager::select_route(NodeId dst, TrafficClass cls) const {
  const auto route = table_.select_route(dst, cls);
  if (!route) return std::nullopt;
  return route->next_hop;
}

void RoutingManager::drop(const Packet& pkt, DropReason reason) {
  Fields f = packet_fields(trace_, pkt);
  f.add("reason", to_string(reason));
  trace_.record(engine_.now(), self_, EventClass::kDrop, std::move(f));
  for (auto* o : observers_) o->on_drop(self_, pkt, reason);
}

void RoutingManager::forward(Packet pkt) {
  if (pkt.dst == self_) {
    if (delivery_filter_ && !delivery_filter_(pkt)) {
      drop(pkt, DropReason::kDuplicate);
      return;
    }
    trace_.record(engine_.now(), self_, EventClass::kDeliver, packet_fields(trace_, pkt));
    for (auto* o : observers_) o->on_deliver(self_, pkt);
    if (app_sink_) app_sink_(pkt);
    return;
  }
  if (pkt.ttl <= 1) {
    pkt.ttl = 0;
    drop(pkt, DropReason::kTtlExpired);
    return;
  }
  pkt.ttl -= 1;

  const auto next = select_route(pkt.dst, pkt.traffic_class);
  if (!next) {
    drop(pkt, DropReason::kNoRoute);
    if (pkt.src != self_) send_route_error(pkt);
    return;
  }

  Fields f = packet_fields(trace_, pkt);
  f.add("next", trace_.name(*next));
  trace_.record(engine_.now(), self_, EventClass::kForward, std::move(f));
  for (auto* o : observers_) o->on_forward(self_, pkt, *next);

  switch (transport_.send(self_, *next, pkt)) {
    case SendStatus::kOk:
      break;
    case SendStatus::kForbiddenByRole:
      drop(pkt, DropReason::kForbiddenByRole);
      break;
    case SendStatus::kUnsupported:
      drop(pkt, DropReason::kUnsupported);
      break;
    case SendStatus::kLost:
    case SendStatus::kNotInGroup:
    case SendStatus::kNoLink:
      drop(pkt, DropReason::kLost);
      discovery_.invalidate_neighbor(*next);
      break;
  }
}

void RoutingManager::on_send_lost(const Packet& pkt, NodeId next_hop) {
  // The link layer has already written the DROP record for the lost frame.
  for (auto* o : observers_) o->on_drop(self_, pkt, DropReason::kLost);
  discovery_.invalidate_neighbor(next_hop);
}

void RoutingManager::send_route_error(const Packet& pkt) {
  on_route_error(self_, RouteError{self_, pkt.src, pkt.dst, pkt.app_seq, config_.default_ttl});
}

void RoutingManager::on_route_error(NodeId /*from*/, RouteError err) {
  auto fields = [&] {
    Fields f;
    f.add("kind", "rerr")
        .add("flow", flow_id(trace_, err.origin, err.app_seq))
        .add("reporter", trace_.name(err.reporter))
        .add("unreachable", trace_.name(err.unreachable))
        .add("ttl", err.ttl);
    return f;
  };
  if (err.origin == self_) {
    trace_.record(engine_.now(), self_, EventClass::kDeliver, fields());
    for (auto* o : observers_) o->on_route_error(self_, err);
    return;
  }
  if (err.ttl <= 1) {
    err.ttl = 0;
    trace_.record(engine_.now(), self_, EventClass::kDrop, std::move(fields().add("reason", "TtlExpired")));
    return;
  }
  err.ttl -= 1;
  const auto next = select_route(err.origin, TrafficClass::kRealTime);
  if (!next) {
    trace_.record(engine_.now(), self_, EventClass::kDrop, std::move(fields().add("reason", "NoRoute")));
    return;
  }
  trace_.record(engine_.now(), self_, EventClass::kForward, std::move(fields().add("next", trace_.name(*next))));
  transport_.send(self_, *next, err);
}

}  // namespace wfd
