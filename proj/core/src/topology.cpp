#include "wfd/topology.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wfd {
namespace {

void check_position(const Position& p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw std::invalid_argument("position must be finite");
}

}  // namespace

UnknownNodeError::UnknownNodeError(NodeId id)
    : std::out_of_range("unknown node id " + std::to_string(id.value)), node_(id) {}

Duration airtime(std::uint64_t size_bits, std::uint64_t data_rate_bps) {
  if (data_rate_bps == 0) throw std::invalid_argument("airtime: zero data rate");
  __extension__ using Wide = unsigned __int128;
  const Wide num = static_cast<Wide>(size_bits) * 1'000'000u;
  const auto us = (num + data_rate_bps - 1) / data_rate_bps;
  return Duration{static_cast<Duration::rep>(us)};
}

NodeId Topology::add_node(Position pos, RadioProfile radio) {
  check_position(pos);
  if (!(radio.range_m > 0.0) || !std::isfinite(radio.range_m)) throw std::invalid_argument("range_m must be > 0");
  if (radio.data_rate_bps == 0) throw std::invalid_argument("data_rate_bps must be > 0");
  if (radio.per_hop_mac_latency < Duration::zero()) throw std::invalid_argument("MAC latency must be >= 0");
  nodes_.push_back(Node{pos, radio});
  return NodeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

std::vector<NodeId> Topology::nodes() const {
  std::vector<NodeId> out;
  out.reserve(nodes_.size());
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) out.push_back(NodeId{i});
  return out;
}

const Topology::Node& Topology::at(NodeId id) const {
  if (!contains(id)) throw UnknownNodeError(id);
  return nodes_[id.value];
}

double Topology::distance(NodeId a, NodeId b) const {
  const auto& pa = at(a).pos;
  const auto& pb = at(b).pos;
  return std::hypot(pa.x - pb.x, pa.y - pb.y);
}

bool Topology::in_range(NodeId a, NodeId b) const {
  const double reach = std::min(at(a).radio.range_m, at(b).radio.range_m);
  if (a == b) return false;
  return distance(a, b) <= reach;
}

std::vector<NodeId> Topology::neighbors(NodeId node) const {
  at(node);
  std::vector<NodeId> out;
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    const NodeId other{i};
    if (other != node && in_range(node, other)) out.push_back(other);
  }
  return out;
}

std::vector<RangeChange> Topology::apply_move(NodeId node, Position new_pos) {
  check_position(new_pos);
  const Position old = at(node).pos;
  if (old == new_pos) return {};

  std::vector<bool> before(nodes_.size());
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) before[i] = in_range(node, NodeId{i});
  nodes_[node.value].pos = new_pos;

  std::vector<RangeChange> changes;
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    const bool now = in_range(node, NodeId{i});
    if (now != before[i]) changes.push_back(RangeChange{node, NodeId{i}, now});
  }
  return changes;
}

Duration Topology::frame_latency(NodeId a, NodeId b, std::uint64_t size_bits) const {
  const auto& ra = at(a).radio;
  const auto& rb = at(b).radio;
  return airtime(size_bits, std::min(ra.data_rate_bps, rb.data_rate_bps)) +
         std::max(ra.per_hop_mac_latency, rb.per_hop_mac_latency);
}

}  // namespace wfd
