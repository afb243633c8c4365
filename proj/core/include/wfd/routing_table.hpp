#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "wfd/types.hpp"

namespace wfd {

inline constexpr std::uint32_t kInfiniteHops = std::numeric_limits<std::uint32_t>::max();

enum class TrafficClass : std::uint8_t {
  kRealTime,  // minimize path latency
  kBulk,      // minimize path energy
};

std::string_view to_string(TrafficClass c);
std::optional<TrafficClass> parse_traffic_class(std::string_view text);

struct RoutingEntry {
  NodeId destination;
  NodeId next_hop;
  std::uint32_t hop_count = 1;
  // Even values are originated by the destination; odd values mark a route
  // invalidated by a broken link.
  std::uint64_t seq_no = 0;
  Duration latency{};
  double energy_cost = 0.0;
  SimTime last_updated{};

  bool valid() const { return hop_count != kInfiniteHops && seq_no % 2 == 0; }
};

struct AdvertEntry {
  NodeId destination;
  std::uint64_t seq_no = 0;
  std::uint32_t hop_count = 0;
  Duration latency{};
  double energy_cost = 0.0;

  bool operator==(const AdvertEntry&) const = default;
};

struct TableAdvert {
  NodeId sender;
  std::vector<AdvertEntry> entries;
  bool full_dump = false;
  std::uint64_t tick = 0;
};

// Measured cost of the one-hop link to an advert's sender.
struct LinkMetrics {
  Duration latency{};
  double energy_cost = 0.0;

  bool operator==(const LinkMetrics&) const = default;
};

// Destination-sequenced distance-vector table for one node.
//
// One primary entry per destination, chosen by sequence number first and then
// by (hop_count, latency, energy). Besides the primary, at most one alternate
// is retained: a candidate through a different next hop carrying the same
// sequence number and the same hop count, the one with the lowest energy
// among those seen. Traffic-class selection runs over these two.
class RoutingTable {
 public:
  explicit RoutingTable(NodeId owner) : owner_(owner) {}

  NodeId owner() const { return owner_; }
  std::uint64_t self_seq() const { return self_seq_; }
  std::size_t size() const { return slots_.size(); }

  // Primary entry, valid or not.
  const RoutingEntry* find(NodeId dst) const;
  // Primaries ordered by destination.
  std::vector<RoutingEntry> entries() const;
  // Valid primary and alternate for dst.
  std::vector<RoutingEntry> candidates(NodeId dst) const;

  // Applies an advert received over `link`. Returns the destinations whose
  // primary route changed (next hop, hops, metrics or validity); they are
  // also added to the dirty set.
  std::set<NodeId> merge_advert(const TableAdvert& advert, const LinkMetrics& link, SimTime now);

  // One-hop entry learned first-hand from a discovery response.
  std::set<NodeId> learn_neighbor(NodeId peer, std::uint64_t peer_seq, const LinkMetrics& link, SimTime now);

  // Marks every route through lost_peer invalid (seq + 1, infinite hops).
  std::set<NodeId> invalidate_next_hop(NodeId lost_peer, SimTime now);

  std::optional<RoutingEntry> select_route(NodeId dst, TrafficClass cls) const;

  // Builds the next advert and clears the dirty set. A full dump carries the
  // owner's own entry (with self_seq advanced by 2) plus every primary; an
  // incremental one carries the dirty destinations whose advertised values
  // differ from what was last sent.
  TableAdvert make_advert(bool full_dump);

  const std::set<NodeId>& dirty() const { return dirty_; }

 private:
  struct Slot {
    RoutingEntry primary;
    std::optional<RoutingEntry> alternate;
  };

  bool merge_candidate(const RoutingEntry& candidate);

  NodeId owner_;
  std::uint64_t self_seq_ = 0;
  std::map<NodeId, Slot> slots_;
  std::set<NodeId> dirty_;
  std::map<NodeId, AdvertEntry> advertised_;
};

// Lexicographic (hop_count, latency, energy) comparison.
bool better_route(const RoutingEntry& a, const RoutingEntry& b);

AdvertEntry to_advert_entry(const RoutingEntry& e);

}  // namespace wfd
