#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "wfd/engine.hpp"
#include "wfd/linklayer.hpp"
#include "wfd/routing.hpp"
#include "wfd/topology.hpp"
#include "wfd/trace.hpp"
#include "wfd/types.hpp"

namespace wfd {

enum class TechnologyId : std::uint8_t {
  kWifiDirectSim,
  kZigbee,
  kBluetooth,
};

std::string_view to_string(TechnologyId id);

struct TransportCapability {
  std::uint64_t max_frame_bits = 0;
  // Serialization time per bit, in nanoseconds.
  double per_bit_delay_ns = 0.0;
};

// One wireless technology as seen by the transfer layer.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual TechnologyId id() const = 0;
  virtual TransportCapability capability() const = 0;
  // Whether this transport carries frames between a and b.
  virtual bool handles(NodeId a, NodeId b) const = 0;
  virtual bool has_links(NodeId node) const = 0;
  virtual SendStatus send(NodeId from, NodeId to, std::uint64_t bits, std::any payload, TraceFields tag) = 0;
  virtual SendStatus broadcast(NodeId from, std::uint64_t bits, std::any payload, TraceFields tag) = 0;
};

// Simulated Wi-Fi Direct over the LinkLayer model.
class WifiDirectTransport final : public Transport {
 public:
  WifiDirectTransport(LinkLayer& link, std::uint64_t data_rate_bps);

  TechnologyId id() const override { return TechnologyId::kWifiDirectSim; }
  TransportCapability capability() const override { return capability_; }
  bool handles(NodeId a, NodeId b) const override { return link_.can_deliver(a, b); }
  bool has_links(NodeId node) const override { return !link_.link_peers(node).empty(); }
  SendStatus send(NodeId from, NodeId to, std::uint64_t bits, std::any payload, TraceFields tag) override;
  SendStatus broadcast(NodeId from, std::uint64_t bits, std::any payload, TraceFields tag) override;

 private:
  LinkLayer& link_;
  TransportCapability capability_;
};

// Registered placeholder for a technology that is not modelled.
class StubTransport final : public Transport {
 public:
  explicit StubTransport(TechnologyId id) : id_(id) {}

  TechnologyId id() const override { return id_; }
  TransportCapability capability() const override { return {}; }
  bool handles(NodeId, NodeId) const override { return false; }
  bool has_links(NodeId) const override { return false; }
  SendStatus send(NodeId, NodeId, std::uint64_t, std::any, TraceFields) override { return SendStatus::kUnsupported; }
  SendStatus broadcast(NodeId, std::uint64_t, std::any, TraceFields) override { return SendStatus::kUnsupported; }

 private:
  TechnologyId id_;
};

class TransportRegistry {
 public:
  // Replaces any transport already registered under the same id.
  void add(std::unique_ptr<Transport> transport);
  bool remove(TechnologyId id);
  Transport* find(TechnologyId id) const;
  std::vector<Transport*> all() const;

  // The transport that handles the a-b link. Falls back to the first
  // registered transport so that it reports why the send cannot happen.
  Transport* for_link(NodeId a, NodeId b) const;

 private:
  std::vector<std::unique_ptr<Transport>> transports_;
};

// Wraps routing messages into frames and hands received frames back up to the
// node's discovery and routing managers.
class DataTransferManager final : public MessageTransport, public LinkObserver {
 public:
  DataTransferManager(TransportRegistry& registry, Trace& trace);

  void register_node(NodeId node, DiscoveryManager& discovery, RoutingManager& routing);

  SendStatus send(NodeId from, NodeId to, const RoutingMessage& msg) override;
  SendStatus broadcast(NodeId from, const RoutingMessage& msg) override;
  bool has_links(NodeId node) const override;

  void on_link_up(NodeId node, NodeId peer) override;
  void on_link_down(NodeId node, NodeId peer) override;
  void on_frame(NodeId at, const Frame& frame) override;
  void on_frame_lost(const Frame& frame, NodeId intended) override;

 private:
  struct Stack {
    DiscoveryManager* discovery = nullptr;
    RoutingManager* routing = nullptr;
  };
  Stack* stack(NodeId node);
  TraceFields tag_for(const RoutingMessage& msg) const;

  TransportRegistry& registry_;
  Trace& trace_;
  std::map<NodeId, Stack> stacks_;
};

enum class ConnectionState : std::uint8_t { kConnecting, kUp, kClosed };

std::string_view to_string(ConnectionState s);

struct Connection {
  std::uint32_t id = 0;
  NodeId local;
  NodeId peer;
  TechnologyId transport = TechnologyId::kWifiDirectSim;
  ConnectionState state = ConnectionState::kConnecting;
};

enum class ConnectionErrorCode : std::uint8_t { kOutOfRange, kRoleConflict, kInvalidParams };

class ConnectionError : public std::runtime_error {
 public:
  ConnectionError(ConnectionErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ConnectionErrorCode code() const { return code_; }

 private:
  ConnectionErrorCode code_;
};

// Drives the link-layer flows needed to connect two devices: discovery and
// GO negotiation for two ungrouped devices, a join for a device meeting an
// existing GO, and a bridge attachment between two GOs.
class ConnectionManager final : public LinkObserver {
 public:
  ConnectionManager(Engine& engine, Topology& topology, LinkLayer& link, Trace& trace);

  // Returns the connection id. The connection starts CONNECTING and becomes
  // UP once the group relation exists (immediately if it already does).
  std::uint32_t connect(NodeId local, NodeId peer);
  void close(std::uint32_t id);

  const Connection& connection(std::uint32_t id) const;
  std::vector<Connection> connections() const;

  void on_link_up(NodeId node, NodeId peer) override;
  void on_link_down(NodeId node, NodeId peer) override;
  void on_discovered(NodeId node, NodeId peer) override;
  void on_discovery_timeout(NodeId node) override;
  void on_negotiation_done(NodeId initiator, NodeId responder, std::optional<NodeId> owner) override;

 private:
  enum class Phase : std::uint8_t { kDiscovering, kNegotiating, kAttaching, kDone };
  struct Pending {
    Connection conn;
    Phase phase = Phase::kDone;
  };

  void trace(NodeId node, Fields fields);
  void mark_up(Pending& p);
  void fail(Pending& p, std::string_view reason);
  void try_negotiate(Pending& p);
  void attach_later(std::uint32_t id, NodeId joiner, NodeId owner, bool bridge);

  Engine& engine_;
  Topology& topology_;
  LinkLayer& link_;
  Trace& trace_;
  std::map<std::uint32_t, Pending> conns_;
  std::uint32_t next_id_ = 1;
};

enum class DeliveryOutcome : std::uint8_t { kDelivered, kNoRoute, kTtlExpired, kLost };

std::string_view to_string(DeliveryOutcome o);

struct DeliveryReport {
  NodeId src;
  NodeId dst;
  std::uint64_t app_seq = 0;
  DeliveryOutcome outcome = DeliveryOutcome::kLost;
  std::vector<NodeId> path;
  Duration end_to_end_latency{};
};

struct ReceivedMessage {
  NodeId src;
  std::uint64_t app_seq = 0;
  std::uint64_t payload_bits = 0;
  SimTime at{};
};

inline constexpr std::size_t kDedupWindow = 1024;

// Application-facing send/receive for every node, plus delivery reports.
class AppDataManager final : public PacketObserver {
 public:
  AppDataManager(Engine& engine, Trace& trace, Duration report_timeout = std::chrono::seconds(30));

  void register_node(NodeId node, RoutingManager& routing);

  std::uint64_t app_send(NodeId src, NodeId dst, std::uint64_t payload_bits, TrafficClass cls);
  const std::vector<ReceivedMessage>& app_receive(NodeId node) const;

  const std::vector<DeliveryReport>& reports() const { return reports_; }
  std::optional<DeliveryReport> report(NodeId src, std::uint64_t app_seq) const;
  void set_report_callback(std::function<void(const DeliveryReport&)> cb) { on_report_ = std::move(cb); }

  void on_forward(NodeId at, const Packet& pkt, NodeId next_hop) override;
  void on_deliver(NodeId at, const Packet& pkt) override;
  void on_drop(NodeId at, const Packet& pkt, DropReason reason) override;

 private:
  using FlowKey = std::pair<NodeId, std::uint64_t>;
  struct Inflight {
    NodeId dst;
    SimTime sent_at{};
    std::vector<NodeId> path;
    EventHandle timeout;
  };
  struct Node {
    RoutingManager* routing = nullptr;
    std::uint64_t next_seq = 1;
    std::vector<ReceivedMessage> inbox;
    std::deque<FlowKey> seen_order;
    std::set<FlowKey> seen;
  };

  Node& node(NodeId id);
  bool accept(NodeId at, const Packet& pkt);
  void extend_path(Inflight& f, NodeId at);
  void finish(const FlowKey& key, DeliveryOutcome outcome);

  Engine& engine_;
  Trace& trace_;
  Duration report_timeout_;
  std::map<NodeId, Node> nodes_;
  std::map<FlowKey, Inflight> inflight_;
  std::vector<DeliveryReport> reports_;
  std::function<void(const DeliveryReport&)> on_report_;
};

}  // namespace wfd
