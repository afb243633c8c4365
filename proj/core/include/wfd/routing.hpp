#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wfd/engine.hpp"
#include "wfd/routing_table.hpp"
#include "wfd/trace.hpp"
#include "wfd/types.hpp"

namespace wfd {

inline constexpr std::uint32_t kDefaultTtl = 16;

struct Packet {
  NodeId src;
  NodeId dst;
  std::uint64_t app_seq = 0;
  std::uint32_t ttl = kDefaultTtl;
  TrafficClass traffic_class = TrafficClass::kRealTime;
  std::uint64_t payload_bits = 0;
};

struct DiscoveryRequest {
  NodeId requester;
  SimTime sent_at;
};

struct DiscoveryResponse {
  NodeId responder;
  NodeId requester;
  std::uint64_t seq_no = 0;
  double energy_cost = 0.0;
  SimTime request_sent_at;
};

// Sent back toward a packet's source when a hop has no route.
struct RouteError {
  NodeId reporter;
  NodeId origin;       // source of the dropped packet
  NodeId unreachable;  // its destination
  std::uint64_t app_seq = 0;
  std::uint32_t ttl = kDefaultTtl;
};

using RoutingMessage = std::variant<DiscoveryRequest, DiscoveryResponse, TableAdvert, Packet, RouteError>;

// Frame size for a routing message. Data packets occupy exactly their payload
// (at least one bit); control messages have fixed header sizes.
std::uint64_t message_bits(const RoutingMessage& msg);

std::string_view message_kind(const RoutingMessage& msg);

enum class SendStatus : std::uint8_t {
  kOk,
  kNoLink,
  kForbiddenByRole,
  kNotInGroup,
  kLost,
  kUnsupported,
};

std::string_view to_string(SendStatus s);

// What the routing layer needs from the layer below (DataTransferManager).
class MessageTransport {
 public:
  virtual ~MessageTransport() = default;
  virtual SendStatus send(NodeId from, NodeId to, const RoutingMessage& msg) = 0;
  virtual SendStatus broadcast(NodeId from, const RoutingMessage& msg) = 0;
  virtual bool has_links(NodeId node) const = 0;
};

enum class DropReason : std::uint8_t {
  kNoRoute,
  kTtlExpired,
  kLost,
  kForbiddenByRole,
  kUnsupported,
  kDuplicate,
  kReportTimeout,
};

std::string_view to_string(DropReason r);

// Observes packet fate network-wide; used for delivery reports.
class PacketObserver {
 public:
  virtual ~PacketObserver() = default;
  virtual void on_forward(NodeId /*at*/, const Packet& /*pkt*/, NodeId /*next_hop*/) {}
  virtual void on_deliver(NodeId /*at*/, const Packet& /*pkt*/) {}
  virtual void on_drop(NodeId /*at*/, const Packet& /*pkt*/, DropReason /*reason*/) {}
  virtual void on_route_error(NodeId /*at*/, const RouteError& /*err*/) {}
};

struct RoutingConfig {
  Duration advert_period = std::chrono::seconds(1);
  std::uint32_t full_dump_interval = 10;
  std::uint32_t default_ttl = kDefaultTtl;
};

// Packet fields as they appear in trace records.
Fields packet_fields(const Trace& trace, const Packet& pkt);
std::string flow_id(const Trace& trace, NodeId src, std::uint64_t app_seq);

// Neighbour discovery plus periodic table broadcast for one node: discovery
// requests populate one-hop entries, and every advert period the node sends
// either the entries that changed since its last advert or, every Nth
// period, its whole table.
class DiscoveryManager {
 public:
  DiscoveryManager(NodeId self, double energy_cost, const RoutingConfig& config, RoutingTable& table, Engine& engine,
                   Trace& trace, MessageTransport& transport);

  NodeId self() const { return self_; }
  double energy_cost() const { return energy_cost_; }

  void broadcast_discovery_request();
  void on_request(NodeId from, const DiscoveryRequest& req);
  void on_response(NodeId from, const DiscoveryResponse& resp);
  void on_advert(NodeId from, const TableAdvert& advert);

  // Timer handler; also callable directly from tests.
  void advert_tick();
  void start_adverts(SimTime first_tick);
  void stop_adverts();
  std::uint64_t tick_count() const { return ticks_; }

  void on_link_up(NodeId peer);
  void on_link_down(NodeId peer);
  std::set<NodeId> invalidate_neighbor(NodeId lost_peer);

  const std::map<NodeId, LinkMetrics>& links() const { return links_; }

 private:
  void trace(EventClass cls, Fields fields);

  NodeId self_;
  double energy_cost_;
  const RoutingConfig& config_;
  RoutingTable& table_;
  Engine& engine_;
  Trace& trace_;
  MessageTransport& transport_;

  std::map<NodeId, LinkMetrics> links_;
  std::uint64_t ticks_ = 0;
  EventHandle advert_timer_;
  bool request_pending_ = false;
};

// Route selection and hop-by-hop forwarding for one node.
class RoutingManager {
 public:
  RoutingManager(NodeId self, const RoutingConfig& config, RoutingTable& table, DiscoveryManager& discovery,
                 Engine& engine, Trace& trace, MessageTransport& transport);

  // Entry point for packets from the application (at the source) and from
  // the transfer layer (at every later hop).
  void forward(Packet pkt);
  void on_route_error(NodeId from, RouteError err);

  std::optional<NodeId> select_route(NodeId dst, TrafficClass cls) const;

  const RoutingConfig& config() const { return config_; }

  void set_app_sink(std::function<void(const Packet&)> sink) { app_sink_ = std::move(sink); }
  // Consulted before a packet is delivered here; returning false drops it as
  // a duplicate.
  void set_delivery_filter(std::function<bool(const Packet&)> filter) { delivery_filter_ = std::move(filter); }
  void add_observer(PacketObserver* observer) { observers_.push_back(observer); }

  // Lost unicast reported by the transfer layer.
  void on_send_lost(const Packet& pkt, NodeId next_hop);

 private:
  void drop(const Packet& pkt, DropReason reason);
  void send_route_error(const Packet& pkt);

  NodeId self_;
  const RoutingConfig& config_;
  RoutingTable& table_;
  DiscoveryManager& discovery_;
  Engine& engine_;
  Trace& trace_;
  MessageTransport& transport_;
  std::function<void(const Packet&)> app_sink_;
  std::function<bool(const Packet&)> delivery_filter_;
  std::vector<PacketObserver*> observers_;
};

}  // namespace wfd
