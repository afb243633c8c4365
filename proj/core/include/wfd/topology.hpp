#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wfd/types.hpp"

namespace wfd {

struct Position {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Position&) const = default;
};

// Per-node radio parameters. Defaults are Wi-Fi Direct figures.
struct RadioProfile {
  double range_m = 200.0;
  std::uint64_t data_rate_bps = 250'000'000;
  Duration per_hop_mac_latency = std::chrono::milliseconds(2);
};

class UnknownNodeError : public std::out_of_range {
 public:
  explicit UnknownNodeError(NodeId id);
  NodeId node() const { return node_; }

 private:
  NodeId node_;
};

// A pair whose reachability flipped because of a move.
struct RangeChange {
  NodeId a;
  NodeId b;
  bool now_in_range;

  bool operator==(const RangeChange&) const = default;
};

// Time a frame of `size_bits` occupies a link, rounded up to whole microseconds.
Duration airtime(std::uint64_t size_bits, std::uint64_t data_rate_bps);

// Node positions on a 2-D plane with a free-space disc model. Two nodes are
// in range iff their distance is at most the smaller of their two ranges,
// which makes reachability symmetric.
class Topology {
 public:
  NodeId add_node(Position pos, RadioProfile radio = {});

  bool contains(NodeId id) const { return id.value < nodes_.size(); }
  std::size_t size() const { return nodes_.size(); }
  std::vector<NodeId> nodes() const;

  const Position& position(NodeId id) const { return at(id).pos; }
  const RadioProfile& radio(NodeId id) const { return at(id).radio; }

  double distance(NodeId a, NodeId b) const;
  bool in_range(NodeId a, NodeId b) const;

  // Sorted by id; never contains `node`.
  std::vector<NodeId> neighbors(NodeId node) const;

  // Moves `node` and returns every pair whose in_range value changed.
  std::vector<RangeChange> apply_move(NodeId node, Position new_pos);

  // Per-frame delay between two in-range nodes: serialization at the slower
  // of the two data rates plus the larger of the two MAC latencies.
  Duration frame_latency(NodeId a, NodeId b, std::uint64_t size_bits) const;

 private:
  struct Node {
    Position pos;
    RadioProfile radio;
  };

  const Node& at(NodeId id) const;

  std::vector<Node> nodes_;
};

}  // namespace wfd
