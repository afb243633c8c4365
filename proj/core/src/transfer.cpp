#include "wfd/transfer.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace wfd {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

SendStatus from_link(LinkStatus s) {
  switch (s) {
    case LinkStatus::kOk: return SendStatus::kOk;
    case LinkStatus::kForbiddenByRole: return SendStatus::kForbiddenByRole;
    case LinkStatus::kNotInGroup: return SendStatus::kNotInGroup;
    case LinkStatus::kLost: return SendStatus::kLost;
    case LinkStatus::kNoLink: return SendStatus::kNoLink;
  }
  return SendStatus::kLost;
}

std::string_view link_error_reason(LinkErrorCode code) {
  switch (code) {
    case LinkErrorCode::kInvalidState: return "invalid_state";
    case LinkErrorCode::kAlreadyInGroup: return "already_in_group";
    case LinkErrorCode::kNotDiscovered: return "not_discovered";
    case LinkErrorCode::kOutOfRange: return "out_of_range";
    case LinkErrorCode::kNotGroupOwner: return "not_group_owner";
    case LinkErrorCode::kPolicyDisabled: return "policy_disabled";
    case LinkErrorCode::kUnknownGroup: return "unknown_group";
    case LinkErrorCode::kInvalidParams: return "invalid_params";
  }
  return "link_error";
}

bool same_pair(const Connection& c, NodeId a, NodeId b) {
  return (c.local == a && c.peer == b) || (c.local == b && c.peer == a);
}

}  // namespace

std::string_view to_string(TechnologyId id) {
  switch (id) {
    case TechnologyId::kWifiDirectSim: return "WIFI_DIRECT_SIM";
    case TechnologyId::kZigbee: return "ZIGBEE";
    case TechnologyId::kBluetooth: return "BLUETOOTH";
  }
  return "UNKNOWN";
}

std::string_view to_string(ConnectionState s) {
  switch (s) {
    case ConnectionState::kConnecting: return "CONNECTING";
    case ConnectionState::kUp: return "UP";
    case ConnectionState::kClosed: return "CLOSED";
  }
  return "UNKNOWN";
}

std::string_view to_string(DeliveryOutcome o) {
  switch (o) {
    case DeliveryOutcome::kDelivered: return "DELIVERED";
    case DeliveryOutcome::kNoRoute: return "NO_ROUTE";
    case DeliveryOutcome::kTtlExpired: return "TTL_EXPIRED";
    case DeliveryOutcome::kLost: return "LOST";
  }
  return "UNKNOWN";
}

// --- transports ----------------------------------------------------------------

WifiDirectTransport::WifiDirectTransport(LinkLayer& link, std::uint64_t data_rate_bps) : link_(link) {
  if (data_rate_bps == 0) throw std::invalid_argument("data rate must be positive");
  capability_.max_frame_bits = std::numeric_limits<std::uint64_t>::max();
  capability_.per_bit_delay_ns = 1e9 / static_cast<double>(data_rate_bps);
}

SendStatus WifiDirectTransport::send(NodeId from, NodeId to, std::uint64_t bits, std::any payload, TraceFields tag) {
  return from_link(link_.unicast(from, to, bits, std::move(payload), std::move(tag)).status);
}

SendStatus WifiDirectTransport::broadcast(NodeId from, std::uint64_t bits, std::any payload, TraceFields tag) {
  return from_link(link_.broadcast(from, bits, std::move(payload), std::move(tag)).status);
}

void TransportRegistry::add(std::unique_ptr<Transport> transport) {
  if (!transport) throw std::invalid_argument("null transport");
  remove(transport->id());
  transports_.push_back(std::move(transport));
}

bool TransportRegistry::remove(TechnologyId id) {
  const auto before = transports_.size();
  std::erase_if(transports_, [id](const auto& t) { return t->id() == id; });
  return transports_.size() != before;
}

Transport* TransportRegistry::find(TechnologyId id) const {
  for (const auto& t : transports_) {
    if (t->id() == id) return t.get();
  }
  return nullptr;
}

std::vector<Transport*> TransportRegistry::all() const {
  std::vector<Transport*> out;
  for (const auto& t : transports_) out.push_back(t.get());
  return out;
}

Transport* TransportRegistry::for_link(NodeId a, NodeId b) const {
  for (const auto& t : transports_) {
    if (t->handles(a, b)) return t.get();
  }
  return transports_.empty() ? nullptr : transports_.front().get();
}

// --- DataTransferManager -------------------------------------------------------

DataTransferManager::DataTransferManager(TransportRegistry& registry, Trace& trace)
    : registry_(registry), trace_(trace) {}

void DataTransferManager::register_node(NodeId node, DiscoveryManager& discovery, RoutingManager& routing) {
  stacks_[node] = Stack{&discovery, &routing};
}

DataTransferManager::Stack* DataTransferManager::stack(NodeId node) {
  auto it = stacks_.find(node);
  return it == stacks_.end() ? nullptr : &it->second;
}

TraceFields DataTransferManager::tag_for(const RoutingMessage& msg) const {
  if (const auto* pkt = std::get_if<Packet>(&msg)) return packet_fields(trace_, *pkt).take();
  Fields f;
  f.add("kind", message_kind(msg));
  if (const auto* err = std::get_if<RouteError>(&msg)) f.add("flow", flow_id(trace_, err->origin, err->app_seq));
  return std::move(f).take();
}

SendStatus DataTransferManager::send(NodeId from, NodeId to, const RoutingMessage& msg) {
  Transport* t = registry_.for_link(from, to);
  if (t == nullptr) return SendStatus::kUnsupported;
  return t->send(from, to, message_bits(msg), msg, tag_for(msg));
}

SendStatus DataTransferManager::broadcast(NodeId from, const RoutingMessage& msg) {
  SendStatus result = SendStatus::kUnsupported;
  for (Transport* t : registry_.all()) {
    const SendStatus s = t->broadcast(from, message_bits(msg), msg, tag_for(msg));
    if (s == SendStatus::kOk) {
      result = s;
    } else if (result != SendStatus::kOk && s != SendStatus::kUnsupported) {
      result = s;
    }
  }
  return result;
}

bool DataTransferManager::has_links(NodeId node) const {
  const auto all = registry_.all();
  return std::any_of(all.begin(), all.end(), [node](const Transport* t) { return t->has_links(node); });
}

void DataTransferManager::on_link_up(NodeId node, NodeId peer) {
  if (Stack* s = stack(node)) s->discovery->on_link_up(peer);
}

void DataTransferManager::on_link_down(NodeId node, NodeId peer) {
  if (Stack* s = stack(node)) s->discovery->on_link_down(peer);
}

void DataTransferManager::on_frame(NodeId at, const Frame& frame) {
  Stack* s = stack(at);
  const auto* msg = std::any_cast<RoutingMessage>(&frame.payload);
  if (s == nullptr || msg == nullptr) return;
  const NodeId from = frame.src;
  std::visit(Overloaded{
                 [&](const DiscoveryRequest& m) { s->discovery->on_request(from, m); },
                 [&](const DiscoveryResponse& m) { s->discovery->on_response(from, m); },
                 [&](const TableAdvert& m) { s->discovery->on_advert(from, m); },
                 [&](const Packet& m) { s->routing->forward(m); },
                 [&](const RouteError& m) { s->routing->on_route_error(from, m); },
             },
             *msg);
}

void DataTransferManager::on_frame_lost(const Frame& frame, NodeId intended) {
  if (frame.broadcast()) return;
  Stack* s = stack(frame.src);
  const auto* msg = std::any_cast<RoutingMessage>(&frame.payload);
  if (s == nullptr || msg == nullptr) return;
  if (const auto* pkt = std::get_if<Packet>(msg)) {
    s->routing->on_send_lost(*pkt, intended);
  } else {
    s->discovery->invalidate_neighbor(intended);
  }
}

// --- ConnectionManager ---------------------------------------------------------

ConnectionManager::ConnectionManager(Engine& engine, Topology& topology, LinkLayer& link, Trace& trace)
    : engine_(engine), topology_(topology), link_(link), trace_(trace) {}

void ConnectionManager::trace(NodeId node, Fields fields) {
  trace_.record(engine_.now(), node, EventClass::kConnect, std::move(fields));
}

std::uint32_t ConnectionManager::connect(NodeId local, NodeId peer) {
  if (!topology_.contains(local) || !topology_.contains(peer) || local == peer) {
    throw ConnectionError(ConnectionErrorCode::kInvalidParams, "connect: invalid node pair");
  }
  if (!topology_.in_range(local, peer)) {
    throw ConnectionError(ConnectionErrorCode::kOutOfRange,
                          "connect: " + trace_.name(local) + " and " + trace_.name(peer) + " are out of range");
  }

  const bool local_go = link_.owned_group(local).has_value();
  const bool peer_go = link_.owned_group(peer).has_value();
  const bool local_gc = link_.client_group(local).has_value();
  const bool peer_gc = link_.client_group(peer).has_value();
  const bool linked = link_.can_deliver(local, peer);

  std::string_view mode = "negotiate";
  if (linked) {
    mode = "existing";
  } else if (local_gc || peer_gc) {
    trace(local, std::move(Fields{}.add("action", "failed").add("peer", trace_.name(peer)).add("reason", "role_conflict")));
    throw ConnectionError(ConnectionErrorCode::kRoleConflict,
                          "connect: a group client cannot connect to another device");
  } else if (local_go && peer_go) {
    if (link_.config().bridging == BridgingPolicy::kNone) {
      trace(local,
            std::move(Fields{}.add("action", "failed").add("peer", trace_.name(peer)).add("reason", "policy_disabled")));
      throw ConnectionError(ConnectionErrorCode::kRoleConflict, "connect: two group owners and bridging is disabled");
    }
    mode = "bridge";
  } else if (local_go || peer_go) {
    mode = "join";
  }

  const std::uint32_t id = next_id_++;
  Pending& p = conns_[id];
  p.conn = Connection{id, local, peer, TechnologyId::kWifiDirectSim, ConnectionState::kConnecting};
  trace(local, std::move(Fields{}.add("action", "request").add("peer", trace_.name(peer)).add("mode", mode)));

  if (linked) {
    mark_up(p);
  } else if (mode == "bridge") {
    attach_later(id, local, peer, true);
  } else if (mode == "join") {
    attach_later(id, local_go ? peer : local, local_go ? local : peer, false);
  } else {
    p.phase = Phase::kDiscovering;
    const auto& dl = link_.discovered_peers(local);
    const auto& dp = link_.discovered_peers(peer);
    if (dl.contains(peer) && dp.contains(local) && link_.state(local) == DeviceState::kIdle &&
        link_.state(peer) == DeviceState::kIdle) {
      engine_.schedule(Duration::zero(), EventKind::kTimer, local, [this, id] {
        auto it = conns_.find(id);
        if (it != conns_.end()) try_negotiate(it->second);
      });
    } else {
      link_.want_peer(local, peer);
      link_.want_peer(peer, local);
    }
  }
  return id;
}

void ConnectionManager::attach_later(std::uint32_t id, NodeId joiner, NodeId owner, bool bridge) {
  conns_.at(id).phase = Phase::kAttaching;
  engine_.schedule(link_.config().timing.wps_auth, EventKind::kTimer, joiner, [this, id, joiner, owner, bridge] {
    auto it = conns_.find(id);
    if (it == conns_.end() || it->second.phase != Phase::kAttaching) return;
    const auto group = link_.owned_group(owner);
    if (!group) {
      fail(it->second, "not_group_owner");
      return;
    }
    try {
      if (bridge) {
        link_.bridge_attach(joiner, *group);
      } else {
        link_.join_group(joiner, *group);
      }
    } catch (const LinkError& e) {
      fail(it->second, link_error_reason(e.code()));
    }
  });
}

void ConnectionManager::try_negotiate(Pending& p) {
  if (p.phase != Phase::kDiscovering) return;
  const NodeId a = p.conn.local;
  const NodeId b = p.conn.peer;
  if (!link_.discovered_peers(a).contains(b) || !link_.discovered_peers(b).contains(a)) return;
  if (link_.state(a) != DeviceState::kIdle || link_.state(b) != DeviceState::kIdle) return;
  p.phase = Phase::kNegotiating;
  try {
    link_.negotiate_go(a, b);
  } catch (const LinkError& e) {
    fail(p, link_error_reason(e.code()));
  }
}

void ConnectionManager::mark_up(Pending& p) {
  if (p.conn.state != ConnectionState::kConnecting) return;
  p.conn.state = ConnectionState::kUp;
  p.phase = Phase::kDone;
  trace(p.conn.local, std::move(Fields{}.add("action", "up").add("peer", trace_.name(p.conn.peer))));
}

void ConnectionManager::fail(Pending& p, std::string_view reason) {
  if (p.conn.state != ConnectionState::kConnecting) return;
  p.conn.state = ConnectionState::kClosed;
  p.phase = Phase::kDone;
  trace(p.conn.local,
        std::move(Fields{}.add("action", "failed").add("peer", trace_.name(p.conn.peer)).add("reason", reason)));
}

void ConnectionManager::close(std::uint32_t id) {
  Pending& p = conns_.at(id);
  if (p.conn.state == ConnectionState::kClosed) return;
  p.conn.state = ConnectionState::kClosed;
  p.phase = Phase::kDone;
  trace(p.conn.local, std::move(Fields{}.add("action", "closed").add("peer", trace_.name(p.conn.peer))));
}

const Connection& ConnectionManager::connection(std::uint32_t id) const {
  auto it = conns_.find(id);
  if (it == conns_.end()) throw std::out_of_range("unknown connection id");
  return it->second.conn;
}

std::vector<Connection> ConnectionManager::connections() const {
  std::vector<Connection> out;
  for (const auto& [id, p] : conns_) out.push_back(p.conn);
  return out;
}

void ConnectionManager::on_link_up(NodeId node, NodeId peer) {
  for (auto& [id, p] : conns_) {
    if (p.conn.state == ConnectionState::kConnecting && p.conn.local == node && p.conn.peer == peer) mark_up(p);
    if (p.conn.state == ConnectionState::kConnecting && p.conn.local == peer && p.conn.peer == node) mark_up(p);
  }
}

void ConnectionManager::on_link_down(NodeId node, NodeId peer) {
  for (auto& [id, p] : conns_) {
    if (p.conn.state == ConnectionState::kUp && p.conn.local == node && p.conn.peer == peer) close(id);
  }
}

void ConnectionManager::on_discovered(NodeId node, NodeId peer) {
  for (auto& [id, p] : conns_) {
    if (p.phase == Phase::kDiscovering && same_pair(p.conn, node, peer)) try_negotiate(p);
  }
}

void ConnectionManager::on_discovery_timeout(NodeId node) {
  for (auto& [id, p] : conns_) {
    if (p.phase == Phase::kDiscovering && (p.conn.local == node || p.conn.peer == node)) {
      fail(p, "discovery_timeout");
    }
  }
}

void ConnectionManager::on_negotiation_done(NodeId initiator, NodeId responder, std::optional<NodeId> owner) {
  for (auto& [id, p] : conns_) {
    if (p.phase != Phase::kNegotiating || !same_pair(p.conn, initiator, responder)) continue;
    if (owner) {
      mark_up(p);
    } else {
      fail(p, "negotiation_failed");
    }
  }
}

// --- AppDataManager ------------------------------------------------------------

AppDataManager::AppDataManager(Engine& engine, Trace& trace, Duration report_timeout)
    : engine_(engine), trace_(trace), report_timeout_(report_timeout) {}

void AppDataManager::register_node(NodeId id, RoutingManager& routing) {
  Node& n = nodes_[id];
  n.routing = &routing;
  routing.add_observer(this);
  routing.set_delivery_filter([this, id](const Packet& pkt) { return accept(id, pkt); });
  routing.set_app_sink([this, id](const Packet& pkt) {
    nodes_.at(id).inbox.push_back(ReceivedMessage{pkt.src, pkt.app_seq, pkt.payload_bits, engine_.now()});
  });
}

AppDataManager::Node& AppDataManager::node(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownNodeError(id);
  return it->second;
}

bool AppDataManager::accept(NodeId at, const Packet& pkt) {
  Node& n = node(at);
  const FlowKey key{pkt.src, pkt.app_seq};
  if (!n.seen.insert(key).second) return false;
  n.seen_order.push_back(key);
  if (n.seen_order.size() > kDedupWindow) {
    n.seen.erase(n.seen_order.front());
    n.seen_order.pop_front();
  }
  return true;
}

std::uint64_t AppDataManager::app_send(NodeId src, NodeId dst, std::uint64_t payload_bits, TrafficClass cls) {
  Node& n = node(src);
  node(dst);
  const std::uint64_t seq = n.next_seq++;
  const FlowKey key{src, seq};
  Inflight& f = inflight_[key];
  f.dst = dst;
  f.sent_at = engine_.now();
  f.path = {src};
  f.timeout = engine_.schedule(report_timeout_, EventKind::kTimer, src, [this, key] {
    auto it = inflight_.find(key);
    if (it == inflight_.end()) return;
    it->second.timeout = EventHandle{};
    Fields fields;
    fields.add("kind", "data")
        .add("flow", flow_id(trace_, key.first, key.second))
        .add("src", trace_.name(key.first))
        .add("dst", trace_.name(it->second.dst))
        .add("seq", key.second)
        .add("reason", "ReportTimeout");
    trace_.record(engine_.now(), key.first, EventClass::kDrop, std::move(fields));
    finish(key, DeliveryOutcome::kLost);
  });

  Packet pkt{src, dst, seq, n.routing->config().default_ttl, cls, payload_bits};
  n.routing->forward(pkt);
  return seq;
}

const std::vector<ReceivedMessage>& AppDataManager::app_receive(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownNodeError(id);
  return it->second.inbox;
}

std::optional<DeliveryReport> AppDataManager::report(NodeId src, std::uint64_t app_seq) const {
  for (const auto& r : reports_) {
    if (r.src == src && r.app_seq == app_seq) return r;
  }
  return std::nullopt;
}

void AppDataManager::extend_path(Inflight& f, NodeId at) {
  if (f.path.empty() || f.path.back() != at) f.path.push_back(at);
}

void AppDataManager::on_forward(NodeId at, const Packet& pkt, NodeId /*next_hop*/) {
  auto it = inflight_.find({pkt.src, pkt.app_seq});
  if (it != inflight_.end()) extend_path(it->second, at);
}

void AppDataManager::on_deliver(NodeId at, const Packet& pkt) {
  const FlowKey key{pkt.src, pkt.app_seq};
  auto it = inflight_.find(key);
  if (it == inflight_.end()) return;
  extend_path(it->second, at);
  finish(key, DeliveryOutcome::kDelivered);
}

void AppDataManager::on_drop(NodeId at, const Packet& pkt, DropReason reason) {
  if (reason == DropReason::kDuplicate) return;
  const FlowKey key{pkt.src, pkt.app_seq};
  auto it = inflight_.find(key);
  if (it == inflight_.end()) return;
  extend_path(it->second, at);
  DeliveryOutcome outcome = DeliveryOutcome::kLost;
  if (reason == DropReason::kNoRoute) outcome = DeliveryOutcome::kNoRoute;
  if (reason == DropReason::kTtlExpired) outcome = DeliveryOutcome::kTtlExpired;
  finish(key, outcome);
}

void AppDataManager::finish(const FlowKey& key, DeliveryOutcome outcome) {
  auto it = inflight_.find(key);
  if (it == inflight_.end()) return;
  Inflight& f = it->second;
  engine_.cancel(f.timeout);
  DeliveryReport r{key.first, f.dst, key.second, outcome, std::move(f.path), engine_.now() - f.sent_at};
  inflight_.erase(it);
  reports_.push_back(r);
  if (on_report_) on_report_(reports_.back());
}

}  // namespace wfd
