#include "wfd/linklayer.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace wfd {

std::string_view to_string(DeviceState s) {
  switch (s) {
    case DeviceState::kIdle: return "idle";
    case DeviceState::kScan: return "scan";
    case DeviceState::kFindSearch: return "search";
    case DeviceState::kFindListen: return "listen";
    case DeviceState::kNegotiating: return "negotiating";
    case DeviceState::kGroupOwner: return "group_owner";
    case DeviceState::kGroupClient: return "group_client";
  }
  return "unknown";
}

std::string_view to_string(LinkStatus s) {
  switch (s) {
    case LinkStatus::kOk: return "Ok";
    case LinkStatus::kForbiddenByRole: return "ForbiddenByRole";
    case LinkStatus::kNotInGroup: return "NotInGroup";
    case LinkStatus::kLost: return "Lost";
    case LinkStatus::kNoLink: return "NoLink";
  }
  return "Unknown";
}

std::optional<GoRole> resolve_go_role(const GoNegotiationParams& initiator, const GoNegotiationParams& responder) {
  if (initiator.intent == kMaxGoIntent && responder.intent == kMaxGoIntent) return std::nullopt;
  if (initiator.intent != responder.intent) {
    return initiator.intent > responder.intent ? GoRole::kInitiator : GoRole::kResponder;
  }
  return initiator.tie_breaker ? GoRole::kInitiator : GoRole::kResponder;
}

std::vector<NodeId> Group::members() const {
  std::vector<NodeId> out(clients.begin(), clients.end());
  out.insert(out.end(), legacy_clients.begin(), legacy_clients.end());
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

bool in_find(DeviceState s) { return s == DeviceState::kFindSearch || s == DeviceState::kFindListen; }

DeviceState opposite(DeviceState s) {
  return s == DeviceState::kFindSearch ? DeviceState::kFindListen : DeviceState::kFindSearch;
}

}  // namespace

LinkLayer::LinkLayer(Engine& engine, Topology& topology, Trace& trace, const RandomSource& random, LinkConfig config)
    : engine_(engine), topology_(topology), trace_(trace), random_(random), config_(config) {
  const auto& t = config_.timing;
  if (t.find_leg_min > t.find_leg_max) throw std::invalid_argument("find leg bounds are inverted");
  if (t.keepalive_period <= Duration::zero()) throw std::invalid_argument("keepalive period must be positive");
  if (t.keepalive_miss_limit < 1) throw std::invalid_argument("keepalive miss limit must be >= 1");
}

void LinkLayer::add_device(NodeId id, int go_intent, int listen_channel) {
  if (!topology_.contains(id)) throw UnknownNodeError(id);
  if (go_intent < 0 || go_intent > kMaxGoIntent) {
    throw LinkError(LinkErrorCode::kInvalidParams, "GO intent must be in 0..15");
  }
  if (std::find(kSocialChannels.begin(), kSocialChannels.end(), listen_channel) == kSocialChannels.end()) {
    throw LinkError(LinkErrorCode::kInvalidParams, "listen channel must be 1, 6 or 11");
  }
  if (devices_.size() <= id.value) devices_.resize(id.value + 1);
  Device& d = devices_[id.value];
  if (d.registered) throw LinkError(LinkErrorCode::kInvalidParams, "device registered twice");
  d.intent = go_intent;
  d.channel = listen_channel;
  d.rng = random_.stream_for(id);
  d.registered = true;
}

LinkLayer::Device& LinkLayer::device(NodeId id) {
  if (id.value >= devices_.size() || !devices_[id.value].registered) throw UnknownNodeError(id);
  return devices_[id.value];
}

const LinkLayer::Device& LinkLayer::device(NodeId id) const {
  if (id.value >= devices_.size() || !devices_[id.value].registered) throw UnknownNodeError(id);
  return devices_[id.value];
}

LinkLayer::GroupState* LinkLayer::group_state(GroupId id) {
  auto it = groups_.find(id);
  return it == groups_.end() ? nullptr : &it->second;
}

const Group* LinkLayer::find_group(GroupId id) const {
  auto it = groups_.find(id);
  return it == groups_.end() ? nullptr : &it->second.group;
}

std::vector<const Group*> LinkLayer::groups() const {
  std::vector<const Group*> out;
  for (const auto& [id, gs] : groups_) out.push_back(&gs.group);
  return out;
}

std::vector<GroupId> LinkLayer::memberships(NodeId node) const {
  const Device& d = device(node);
  std::vector<GroupId> out;
  if (d.owned) out.push_back(*d.owned);
  if (d.client_of) out.push_back(*d.client_of);
  out.insert(out.end(), d.bridged.begin(), d.bridged.end());
  std::sort(out.begin(), out.end());
  return out;
}

void LinkLayer::trace(NodeId node, EventClass cls, Fields fields) {
  trace_.record(engine_.now(), node, cls, std::move(fields));
}

// --- discovery ---------------------------------------------------------------

bool LinkLayer::discovering(NodeId node) const {
  const auto s = device(node).state;
  return s == DeviceState::kScan || in_find(s);
}

void LinkLayer::start_discovery(NodeId node) {
  Device& d = device(node);
  if (d.state != DeviceState::kIdle) {
    throw LinkError(LinkErrorCode::kInvalidState,
                    "start_discovery: " + trace_.name(node) + " is " + std::string(to_string(d.state)));
  }
  const auto& t = config_.timing;
  d.state = DeviceState::kScan;
  trace(node, EventClass::kDiscovery, std::move(Fields{}.add("action", "scan").add("dur_us", t.scan)));

  d.timeout_timer = engine_.schedule(t.discovery_timeout, EventKind::kTimer, node, [this, node] {
    Device& dev = device(node);
    dev.timeout_timer = EventHandle{};
    trace(node, EventClass::kDiscovery, std::move(Fields{}.add("action", "timeout")));
    end_discovery(node);
    for (auto* o : observers_) o->on_discovery_timeout(node);
  });
  d.leg_timer = engine_.schedule(t.scan, EventKind::kTimer, node, [this, node] {
    Device& dev = device(node);
    const DeviceState first = dev.rng.bit() ? DeviceState::kFindSearch : DeviceState::kFindListen;
    begin_find_leg(node, first);
  });
}

void LinkLayer::want_peer(NodeId node, NodeId peer) {
  Device& d = device(node);
  device(peer);
  d.wanted.insert(peer);
  if (d.state == DeviceState::kIdle) start_discovery(node);
}

void LinkLayer::end_discovery(NodeId node) {
  Device& d = device(node);
  engine_.cancel(d.leg_timer);
  engine_.cancel(d.timeout_timer);
  d.wanted.clear();
  d.leg = Leg{};
  d.state = DeviceState::kIdle;
}

void LinkLayer::begin_find_leg(NodeId node, DeviceState leg_state) {
  Device& d = device(node);
  const auto& t = config_.timing;
  const Duration dur = d.rng.uniform_duration(t.find_leg_min, t.find_leg_max);
  d.state = leg_state;
  d.leg = Leg{leg_state, engine_.now(), engine_.now() + dur, d.next_leg_serial++};
  trace(node, EventClass::kDiscovery,
        std::move(Fields{}
                      .add("action", "leg")
                      .add("state", to_string(leg_state))
                      .add("ch", d.channel)
                      .add("dur_us", dur)));
  d.leg_timer = engine_.schedule(dur, EventKind::kTimer, node,
                                 [this, node, leg_state] { begin_find_leg(node, opposite(leg_state)); });
  check_overlaps(node);
}

ProbeOutcome LinkLayer::probe_exchange(NodeId a, NodeId b) const {
  const Device& da = device(a);
  const Device& db = device(b);
  if (a == b || !topology_.in_range(a, b)) return ProbeOutcome::kNotYet;
  if (!in_find(da.state) || !in_find(db.state) || da.state == db.state) return ProbeOutcome::kNotYet;
  if (da.channel != db.channel) return ProbeOutcome::kNotYet;
  return ProbeOutcome::kDiscovered;
}

// Every search/listen overlap begins at the start of one of the two legs, so
// checking at leg starts finds each overlap exactly once.
void LinkLayer::check_overlaps(NodeId node) {
  const Device& d = device(node);
  for (std::uint32_t i = 0; i < devices_.size(); ++i) {
    const NodeId other{i};
    if (other == node || !devices_[i].registered) continue;
    if (probe_exchange(node, other) != ProbeOutcome::kDiscovered) continue;
    const Device& o = devices_[i];
    const SimTime overlap_end = std::min(d.leg.end, o.leg.end);
    if (overlap_end - engine_.now() < config_.timing.probe_overlap) continue;
    const std::uint64_t leg_a = d.leg.serial;
    const std::uint64_t leg_b = o.leg.serial;
    engine_.schedule(config_.timing.probe_overlap, EventKind::kTimer, node,
                     [this, node, leg_a, other, leg_b] { on_probe_success(node, leg_a, other, leg_b); });
  }
}

void LinkLayer::on_probe_success(NodeId a, std::uint64_t leg_a, NodeId b, std::uint64_t leg_b) {
  Device& da = device(a);
  Device& db = device(b);
  if (da.leg.serial != leg_a || db.leg.serial != leg_b) return;
  if (!in_find(da.state) || !in_find(db.state) || !topology_.in_range(a, b)) return;

  std::vector<NodeId> completed;
  for (auto [self, peer] : {std::pair{a, b}, std::pair{b, a}}) {
    Device& ds = device(self);
    const Device& dp = device(peer);
    const bool fresh = ds.discovered.insert(peer).second;
    const bool done = ds.wanted.empty() || ds.wanted.contains(peer);
    if (fresh || done) {
      trace(self, EventClass::kDiscovery,
            std::move(Fields{}.add("action", "found").add("peer", trace_.name(peer)).add("intent", dp.intent)));
    }
    if (done) completed.push_back(self);
  }
  for (NodeId n : completed) {
    end_discovery(n);
    trace(n, EventClass::kDiscovery, std::move(Fields{}.add("action", "complete")));
  }
  for (NodeId n : completed) {
    for (auto* o : observers_) o->on_discovered(n, n == a ? b : a);
  }
}

// --- negotiation -------------------------------------------------------------

void LinkLayer::send_negotiation_frame(NodeId from, NodeId to, std::function<void()> on_arrival,
                                       std::function<void()> on_lost) {
  const Duration delay = topology_.frame_latency(from, to, config_.negotiation_frame_bits);
  engine_.schedule(delay, EventKind::kFrameArrival, to,
                   [this, from, to, on_arrival = std::move(on_arrival), on_lost = std::move(on_lost)] {
                     if (topology_.in_range(from, to)) {
                       on_arrival();
                     } else {
                       on_lost();
                     }
                   });
}

void LinkLayer::negotiate_go(NodeId initiator, NodeId responder, std::optional<bool> tie_breaker) {
  if (initiator == responder) throw LinkError(LinkErrorCode::kInvalidParams, "cannot negotiate with self");
  Device& di = device(initiator);
  Device& dr = device(responder);
  for (const Device* d : {&di, &dr}) {
    if (d->owned || d->client_of) throw LinkError(LinkErrorCode::kAlreadyInGroup, "negotiate_go: node already in a group");
    if (d->state != DeviceState::kIdle) throw LinkError(LinkErrorCode::kInvalidState, "negotiate_go: node not idle");
  }
  if (!di.discovered.contains(responder) || !dr.discovered.contains(initiator)) {
    throw LinkError(LinkErrorCode::kNotDiscovered, "negotiate_go: peers have not discovered each other");
  }

  const GoNegotiationParams init_params{di.intent, tie_breaker.value_or(di.rng.bit())};
  const GoNegotiationParams resp_params{dr.intent, false};
  di.state = DeviceState::kNegotiating;
  dr.state = DeviceState::kNegotiating;

  auto lost = [this, initiator, responder] { fail_negotiation(initiator, responder, "lost"); };
  trace(initiator, EventClass::kNegotiation,
        std::move(Fields{}
                      .add("action", "request")
                      .add("peer", trace_.name(responder))
                      .add("intent", init_params.intent)
                      .add("tie", init_params.tie_breaker)));
  send_negotiation_frame(initiator, responder, [=, this] {
    trace(responder, EventClass::kNegotiation,
          std::move(Fields{}.add("action", "response").add("peer", trace_.name(initiator)).add("intent", resp_params.intent)));
    send_negotiation_frame(responder, initiator, [=, this] {
      const auto role = resolve_go_role(init_params, resp_params);
      trace(initiator, EventClass::kNegotiation,
            std::move(Fields{}
                          .add("action", "confirm")
                          .add("peer", trace_.name(responder))
                          .add("status", role ? "ok" : "intent_conflict")));
      send_negotiation_frame(initiator, responder, [=, this] {
        if (!role) {
          fail_negotiation(initiator, responder, "intent_conflict");
          return;
        }
        const NodeId owner = *role == GoRole::kInitiator ? initiator : responder;
        engine_.schedule(config_.timing.wps_auth, EventKind::kTimer, owner, [=, this] {
          if (!topology_.in_range(initiator, responder)) {
            fail_negotiation(initiator, responder, "lost");
            return;
          }
          form_group(initiator, responder, owner);
        });
      }, lost);
    }, lost);
  }, lost);
}

void LinkLayer::fail_negotiation(NodeId initiator, NodeId responder, std::string_view reason) {
  for (NodeId n : {initiator, responder}) {
    Device& d = device(n);
    if (d.state == DeviceState::kNegotiating) d.state = DeviceState::kIdle;
  }
  trace(initiator, EventClass::kNegotiation,
        std::move(Fields{}.add("action", "failed").add("peer", trace_.name(responder)).add("reason", reason)));
  for (auto* o : observers_) o->on_negotiation_done(initiator, responder, std::nullopt);
}

void LinkLayer::form_group(NodeId initiator, NodeId responder, NodeId owner) {
  const NodeId client = owner == initiator ? responder : initiator;
  const GroupId id = next_group_id_++;
  GroupState& gs = groups_[id];
  gs.group.id = id;
  gs.group.owner = owner;
  gs.group.channel = device(owner).channel;
  gs.group.addresses[owner] = 1;
  gs.group.clients.insert(client);
  gs.group.addresses[client] = gs.group.next_address++;

  Device& dow = device(owner);
  Device& dcl = device(client);
  dow.state = DeviceState::kGroupOwner;
  dow.owned = id;
  dcl.state = DeviceState::kGroupClient;
  dcl.client_of = id;

  trace(initiator, EventClass::kNegotiation,
        std::move(Fields{}.add("action", "result").add("owner", trace_.name(owner)).add("client", trace_.name(client))));
  trace(owner, EventClass::kGroup,
        std::move(Fields{}
                      .add("action", "formed")
                      .add("group", id)
                      .add("channel", gs.group.channel)
                      .add("addr", 1)));
  trace(client, EventClass::kGroup,
        std::move(Fields{}
                      .add("action", "join")
                      .add("group", id)
                      .add("owner", trace_.name(owner))
                      .add("addr", gs.group.addresses[client])));

  gs.keepalive = engine_.schedule(config_.timing.keepalive_period, EventKind::kTimer, owner,
                                  [this, id] { keepalive_tick(id); });
  for (auto* o : observers_) o->on_negotiation_done(initiator, responder, owner);
  notify_link(owner, client, true);
}

// --- group lifecycle ---------------------------------------------------------

void LinkLayer::join_group(NodeId client, GroupId group) {
  Device& d = device(client);
  GroupState* gs = group_state(group);
  if (gs == nullptr) throw LinkError(LinkErrorCode::kUnknownGroup, "join_group: unknown group");
  if (d.owned || d.client_of) {
    throw LinkError(LinkErrorCode::kAlreadyInGroup, "join_group: " + trace_.name(client) + " is already in a group");
  }
  if (d.state != DeviceState::kIdle) throw LinkError(LinkErrorCode::kInvalidState, "join_group: client not idle");
  if (!topology_.in_range(client, gs->group.owner)) {
    throw LinkError(LinkErrorCode::kOutOfRange, "join_group: owner out of range");
  }
  gs->group.clients.insert(client);
  const int addr = gs->group.next_address++;
  gs->group.addresses[client] = addr;
  gs->misses[client] = 0;
  d.state = DeviceState::kGroupClient;
  d.client_of = group;
  trace(client, EventClass::kGroup,
        std::move(Fields{}
                      .add("action", "join")
                      .add("group", group)
                      .add("owner", trace_.name(gs->group.owner))
                      .add("addr", addr)));
  notify_link(gs->group.owner, client, true);
}

void LinkLayer::bridge_attach(NodeId go_node, GroupId foreign_group) {
  if (config_.bridging == BridgingPolicy::kNone) {
    throw LinkError(LinkErrorCode::kPolicyDisabled, "bridge_attach: bridging policy is NONE");
  }
  Device& d = device(go_node);
  if (!d.owned) {
    throw LinkError(LinkErrorCode::kNotGroupOwner, "bridge_attach: " + trace_.name(go_node) + " is not a group owner");
  }
  GroupState* gs = group_state(foreign_group);
  if (gs == nullptr) throw LinkError(LinkErrorCode::kUnknownGroup, "bridge_attach: unknown group");
  if (gs->group.owner == go_node || gs->group.is_member(go_node)) {
    throw LinkError(LinkErrorCode::kAlreadyInGroup, "bridge_attach: already attached");
  }
  if (!topology_.in_range(go_node, gs->group.owner)) {
    throw LinkError(LinkErrorCode::kOutOfRange, "bridge_attach: foreign owner out of range");
  }
  gs->group.legacy_clients.insert(go_node);
  const int addr = gs->group.next_address++;
  gs->group.addresses[go_node] = addr;
  gs->misses[go_node] = 0;
  d.bridged.insert(foreign_group);
  trace(go_node, EventClass::kGroup,
        std::move(Fields{}
                      .add("action", "bridge")
                      .add("group", foreign_group)
                      .add("owner", trace_.name(gs->group.owner))
                      .add("addr", addr)));
  notify_link(gs->group.owner, go_node, true);
}

void LinkLayer::bridge_detach(NodeId go_node, GroupId foreign_group) {
  GroupState* gs = group_state(foreign_group);
  if (gs == nullptr || !gs->group.legacy_clients.contains(go_node)) return;
  remove_member(*gs, go_node, "detach");
}

void LinkLayer::leave_group(NodeId node) {
  Device& d = device(node);
  if (d.owned) {
    dissolve_group(*d.owned);
    return;
  }
  if (d.client_of) {
    if (GroupState* gs = group_state(*d.client_of)) remove_member(*gs, node, "leave");
  }
}

void LinkLayer::remove_member(GroupState& gs, NodeId member, std::string_view reason) {
  Group& g = gs.group;
  Device& d = device(member);
  const bool legacy = g.legacy_clients.erase(member) > 0;
  if (!legacy) g.clients.erase(member);
  g.addresses.erase(member);
  gs.misses.erase(member);
  if (legacy) {
    d.bridged.erase(g.id);
  } else {
    d.client_of.reset();
    d.state = DeviceState::kIdle;
  }
  trace(member, EventClass::kGroup,
        std::move(Fields{}.add("action", reason).add("group", g.id).add("owner", trace_.name(g.owner))));
  notify_link(g.owner, member, false);
}

void LinkLayer::dissolve_group(GroupId id) {
  auto it = groups_.find(id);
  if (it == groups_.end()) return;
  GroupState& gs = it->second;
  engine_.cancel(gs.keepalive);
  const NodeId owner = gs.group.owner;

  trace(owner, EventClass::kGroup, std::move(Fields{}.add("action", "dissolve").add("group", id)));
  for (NodeId m : gs.group.members()) remove_member(gs, m, "dissolved");

  Device& d = device(owner);
  d.owned.reset();
  d.state = DeviceState::kIdle;
  groups_.erase(it);

  // Bridging requires GO status, so the former owner drops its attachments.
  const std::set<GroupId> attachments = d.bridged;
  for (GroupId foreign : attachments) bridge_detach(owner, foreign);
}

void LinkLayer::keepalive_tick(GroupId id) {
  GroupState* gs = group_state(id);
  if (gs == nullptr) return;
  const NodeId owner = gs->group.owner;
  const auto members = gs->group.members();
  std::vector<NodeId> evict;
  for (NodeId m : members) {
    int& misses = gs->misses[m];
    misses = topology_.in_range(owner, m) ? 0 : misses + 1;
    if (misses > 0) {
      trace(owner, EventClass::kConnect,
            std::move(Fields{}.add("action", "keepalive_miss").add("peer", trace_.name(m)).add("misses", misses)));
    }
    if (misses >= config_.timing.keepalive_miss_limit) evict.push_back(m);
  }
  if (!members.empty() && evict.size() == members.size()) {
    dissolve_group(id);
    return;
  }
  for (NodeId m : evict) remove_member(*gs, m, "evict");
  gs->keepalive = engine_.schedule(config_.timing.keepalive_period, EventKind::kTimer, owner,
                                   [this, id] { keepalive_tick(id); });
}

void LinkLayer::handle_range_change(const RangeChange& change) {
  for (const auto& [id, gs] : groups_) {
    const Group& g = gs.group;
    NodeId member;
    if (g.owner == change.a && g.is_member(change.b)) {
      member = change.b;
    } else if (g.owner == change.b && g.is_member(change.a)) {
      member = change.a;
    } else {
      continue;
    }
    trace(member, EventClass::kConnect,
          std::move(Fields{}
                        .add("action", change.now_in_range ? "link_restored" : "link_lost")
                        .add("peer", trace_.name(g.owner))
                        .add("group", id)));
  }
}

void LinkLayer::notify_link(NodeId a, NodeId b, bool up) {
  for (auto* o : observers_) {
    if (up) {
      o->on_link_up(a, b);
      o->on_link_up(b, a);
    } else {
      o->on_link_down(a, b);
      o->on_link_down(b, a);
    }
  }
}

// --- frames ------------------------------------------------------------------

bool LinkLayer::can_deliver(NodeId a, NodeId b) const {
  if (a == b) return false;
  for (const auto& [id, gs] : groups_) {
    const Group& g = gs.group;
    if ((g.owner == a && g.is_member(b)) || (g.owner == b && g.is_member(a))) return true;
  }
  return false;
}

std::vector<NodeId> LinkLayer::link_peers(NodeId node) const {
  std::set<NodeId> peers;
  for (const auto& [id, gs] : groups_) {
    const Group& g = gs.group;
    if (g.owner == node) {
      for (NodeId m : g.members()) peers.insert(m);
    } else if (g.is_member(node)) {
      peers.insert(g.owner);
    }
  }
  return {peers.begin(), peers.end()};
}

DeliveryResult LinkLayer::deliver_frame(Frame frame) {
  if (frame.size_bits == 0) throw std::invalid_argument("deliver_frame: frame size must be > 0");
  const GroupState* gs = group_state(frame.group);
  if (gs == nullptr || !gs->group.is_member(frame.src)) return {LinkStatus::kNotInGroup, {}};
  const Group& g = gs->group;

  std::vector<NodeId> recipients;
  if (frame.dst) {
    const NodeId dst = *frame.dst;
    if (dst == frame.src || !g.is_member(dst)) return {LinkStatus::kNotInGroup, {}};
    if (frame.src != g.owner && dst != g.owner) return {LinkStatus::kForbiddenByRole, {}};
    recipients.push_back(dst);
  } else if (frame.src == g.owner) {
    for (NodeId m : g.members()) {
      if (topology_.in_range(frame.src, m)) recipients.push_back(m);
    }
  } else if (topology_.in_range(frame.src, g.owner)) {
    recipients.push_back(g.owner);
  }

  for (NodeId r : recipients) {
    const Duration delay = topology_.frame_latency(frame.src, r, frame.size_bits);
    engine_.schedule(delay, EventKind::kFrameArrival, r, [this, frame, r] { deliver_to(frame, r); });
  }
  return {LinkStatus::kOk, std::move(recipients)};
}

void LinkLayer::deliver_to(const Frame& frame, NodeId recipient) {
  const GroupState* gs = group_state(frame.group);
  const bool still_linked = gs != nullptr && gs->group.is_member(frame.src) && gs->group.is_member(recipient) &&
                            (gs->group.owner == frame.src || gs->group.owner == recipient);
  if (!still_linked || !topology_.in_range(frame.src, recipient)) {
    Fields f;
    f.add("reason", "Lost").add("from", trace_.name(frame.src)).add("to", trace_.name(recipient));
    f.add("group", frame.group).add("bits", frame.size_bits);
    for (const auto& [k, v] : frame.trace_tag) f.add(k, v);
    trace(recipient, EventClass::kDrop, std::move(f));
    for (auto* o : observers_) o->on_frame_lost(frame, recipient);
    return;
  }
  const int copies = filter_ ? filter_(frame, recipient) : 1;
  for (int i = 0; i < copies; ++i) {
    for (auto* o : observers_) o->on_frame(recipient, frame);
  }
}

DeliveryResult LinkLayer::unicast(NodeId src, NodeId dst, std::uint64_t size_bits, std::any payload, TraceFields tag) {
  const auto groups = memberships(src);
  if (groups.empty()) return {LinkStatus::kNoLink, {}};
  std::optional<GroupId> chosen;
  for (GroupId id : groups) {
    const Group& g = groups_.at(id).group;
    if (!g.is_member(dst)) continue;
    if (g.owner == src || g.owner == dst) {
      chosen = id;
      break;
    }
    if (!chosen) chosen = id;  // shared group, but both are clients
  }
  Frame frame{src, dst, chosen.value_or(groups.front()), size_bits, std::move(payload), std::move(tag)};
  return deliver_frame(std::move(frame));
}

DeliveryResult LinkLayer::broadcast(NodeId src, std::uint64_t size_bits, std::any payload, TraceFields tag) {
  const auto groups = memberships(src);
  if (groups.empty()) return {LinkStatus::kNoLink, {}};
  DeliveryResult total;
  for (GroupId id : groups) {
    auto r = deliver_frame(Frame{src, std::nullopt, id, size_bits, payload, tag});
    total.recipients.insert(total.recipients.end(), r.recipients.begin(), r.recipients.end());
  }
  return total;
}

}  // namespace wfd
