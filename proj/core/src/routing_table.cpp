#include "wfd/routing_table.hpp"

#include <algorithm>
#include <tuple>

namespace wfd {

std::string_view to_string(TrafficClass c) { return c == TrafficClass::kRealTime ? "real_time" : "bulk"; }

std::optional<TrafficClass> parse_traffic_class(std::string_view text) {
  if (text == "real_time") return TrafficClass::kRealTime;
  if (text == "bulk") return TrafficClass::kBulk;
  return std::nullopt;
}

bool better_route(const RoutingEntry& a, const RoutingEntry& b) {
  return std::tie(a.hop_count, a.latency, a.energy_cost) < std::tie(b.hop_count, b.latency, b.energy_cost);
}

AdvertEntry to_advert_entry(const RoutingEntry& e) {
  return AdvertEntry{e.destination, e.seq_no, e.hop_count, e.latency, e.energy_cost};
}

namespace {

bool cheaper(const RoutingEntry& a, const RoutingEntry& b) {
  return std::tie(a.energy_cost, a.hop_count, a.next_hop) < std::tie(b.energy_cost, b.hop_count, b.next_hop);
}

bool faster(const RoutingEntry& a, const RoutingEntry& b) {
  return std::tie(a.latency, a.hop_count, a.next_hop) < std::tie(b.latency, b.hop_count, b.next_hop);
}

// What a change to the primary means for forwarding and for neighbours.
bool same_route(const RoutingEntry& a, const RoutingEntry& b) {
  return a.next_hop == b.next_hop && a.hop_count == b.hop_count && a.latency == b.latency &&
         a.energy_cost == b.energy_cost && a.valid() == b.valid();
}

// Advertised values that matter to neighbours; sequence-only refreshes are
// left to full dumps.
bool same_advertised(const AdvertEntry& a, const AdvertEntry& b) {
  return a.hop_count == b.hop_count && a.latency == b.latency && a.energy_cost == b.energy_cost &&
         (a.seq_no % 2) == (b.seq_no % 2);
}

}  // namespace

const RoutingEntry* RoutingTable::find(NodeId dst) const {
  auto it = slots_.find(dst);
  return it == slots_.end() ? nullptr : &it->second.primary;
}

std::vector<RoutingEntry> RoutingTable::entries() const {
  std::vector<RoutingEntry> out;
  out.reserve(slots_.size());
  for (const auto& [dst, slot] : slots_) out.push_back(slot.primary);
  return out;
}

std::vector<RoutingEntry> RoutingTable::candidates(NodeId dst) const {
  std::vector<RoutingEntry> out;
  auto it = slots_.find(dst);
  if (it == slots_.end() || !it->second.primary.valid()) return out;
  out.push_back(it->second.primary);
  if (it->second.alternate) out.push_back(*it->second.alternate);
  return out;
}

bool RoutingTable::merge_candidate(const RoutingEntry& c) {
  auto it = slots_.find(c.destination);
  if (it == slots_.end()) {
    if (!c.valid()) return false;
    slots_.emplace(c.destination, Slot{c, std::nullopt});
    return true;
  }

  Slot& slot = it->second;
  const RoutingEntry before = slot.primary;
  if (c.seq_no > slot.primary.seq_no) {
    slot = Slot{c, std::nullopt};
  } else if (c.seq_no == slot.primary.seq_no && c.valid()) {
    if (better_route(c, slot.primary)) {
      std::optional<RoutingEntry> alt;
      for (const auto* other : {&slot.primary, slot.alternate ? &*slot.alternate : nullptr}) {
        if (other == nullptr || !other->valid()) continue;
        if (other->hop_count != c.hop_count || other->next_hop == c.next_hop) continue;
        if (!alt || cheaper(*other, *alt)) alt = *other;
      }
      slot.primary = c;
      slot.alternate = alt;
    } else if (c.next_hop != slot.primary.next_hop && c.hop_count == slot.primary.hop_count) {
      auto& alt = slot.alternate;
      if (!alt || alt->next_hop == c.next_hop || cheaper(c, *alt)) alt = c;
    }
  }
  return !same_route(before, slot.primary);
}

std::set<NodeId> RoutingTable::merge_advert(const TableAdvert& advert, const LinkMetrics& link, SimTime now) {
  std::set<NodeId> changed;
  for (const AdvertEntry& e : advert.entries) {
    if (e.destination == owner_) continue;
    RoutingEntry c;
    c.destination = e.destination;
    c.next_hop = advert.sender;
    c.seq_no = e.seq_no;
    c.hop_count = e.hop_count == kInfiniteHops ? kInfiniteHops : e.hop_count + 1;
    c.latency = e.latency + link.latency;
    c.energy_cost = e.energy_cost + link.energy_cost;
    c.last_updated = now;
    if (merge_candidate(c)) changed.insert(e.destination);
  }
  dirty_.insert(changed.begin(), changed.end());
  return changed;
}

std::set<NodeId> RoutingTable::learn_neighbor(NodeId peer, std::uint64_t peer_seq, const LinkMetrics& link,
                                              SimTime now) {
  TableAdvert advert{peer, {AdvertEntry{peer, peer_seq, 0, Duration::zero(), 0.0}}, false, 0};
  return merge_advert(advert, link, now);
}

std::set<NodeId> RoutingTable::invalidate_next_hop(NodeId lost_peer, SimTime now) {
  std::set<NodeId> changed;
  for (auto& [dst, slot] : slots_) {
    if (slot.alternate && slot.alternate->next_hop == lost_peer) slot.alternate.reset();
    RoutingEntry& p = slot.primary;
    if (p.next_hop != lost_peer || !p.valid()) continue;
    p.seq_no += 1;
    p.hop_count = kInfiniteHops;
    p.last_updated = now;
    slot.alternate.reset();
    changed.insert(dst);
  }
  dirty_.insert(changed.begin(), changed.end());
  return changed;
}

std::optional<RoutingEntry> RoutingTable::select_route(NodeId dst, TrafficClass cls) const {
  const auto cands = candidates(dst);
  if (cands.empty()) return std::nullopt;
  const auto best = cls == TrafficClass::kRealTime ? std::min_element(cands.begin(), cands.end(), faster)
                                                   : std::min_element(cands.begin(), cands.end(), cheaper);
  return *best;
}

TableAdvert RoutingTable::make_advert(bool full_dump) {
  TableAdvert advert;
  advert.sender = owner_;
  advert.full_dump = full_dump;
  if (full_dump) {
    self_seq_ += 2;
    advert.entries.push_back(AdvertEntry{owner_, self_seq_, 0, Duration::zero(), 0.0});
    for (const auto& [dst, slot] : slots_) {
      const AdvertEntry e = to_advert_entry(slot.primary);
      advertised_[dst] = e;
      advert.entries.push_back(e);
    }
  } else {
    for (NodeId dst : dirty_) {
      auto it = slots_.find(dst);
      if (it == slots_.end()) continue;
      const AdvertEntry e = to_advert_entry(it->second.primary);
      auto prev = advertised_.find(dst);
      if (prev != advertised_.end() && same_advertised(prev->second, e)) continue;
      advertised_[dst] = e;
      advert.entries.push_back(e);
    }
  }
  dirty_.clear();
  return advert;
}

}  // namespace wfd
