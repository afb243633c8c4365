#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "wfd/engine.hpp"
#include "wfd/linklayer.hpp"
#include "wfd/random.hpp"
#include "wfd/routing.hpp"
#include "wfd/routing_table.hpp"
#include "wfd/topology.hpp"
#include "wfd/trace.hpp"
#include "wfd/transfer.hpp"

namespace wfd {

struct NodeSpec {
  std::string name;
  Position position;
  RadioProfile radio;
  int go_intent = 7;
  double energy_cost = 1.0;
  int channel = 6;
};

struct NetworkConfig {
  std::uint64_t seed = 1;
  LinkConfig link;
  RoutingConfig routing;
  Duration report_timeout = std::chrono::seconds(30);
};

// Owns one simulated network: engine, trace, topology, the shared link layer
// and the per-node routing stacks, wired together.
class Network {
 public:
  Network(const NetworkConfig& config, const std::vector<NodeSpec>& nodes);
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  Engine& engine() { return engine_; }
  Trace& trace() { return trace_; }
  Topology& topology() { return topology_; }
  LinkLayer& link() { return *link_; }
  TransportRegistry& transports() { return transports_; }
  DataTransferManager& transfer() { return *transfer_; }
  ConnectionManager& connections() { return *connections_; }
  AppDataManager& app() { return *app_; }
  const NetworkConfig& config() const { return config_; }

  std::size_t size() const { return stacks_.size(); }
  NodeId id(std::string_view name) const;
  const std::string& name(NodeId id) const { return trace_.name(id); }

  RoutingTable& table(NodeId id) { return stack(id).table; }
  DiscoveryManager& discovery(NodeId id) { return stack(id).discovery; }
  RoutingManager& routing(NodeId id) { return stack(id).routing; }

  // Every node starts its advert timer at `first_tick`.
  void start_adverts(SimTime first_tick);

  // Applies a move now and reports each reachability flip to the link layer.
  void move(NodeId node, Position pos);

  void schedule_move(SimTime at, NodeId node, Position pos);
  // A failed connect is traced as CONNECT action=failed; it does not throw.
  void schedule_connect(SimTime at, NodeId local, NodeId peer);
  void schedule_send(SimTime at, NodeId src, NodeId dst, std::uint64_t payload_bits, TrafficClass cls);

  void run_until(SimTime t_end) { engine_.run_until(t_end); }

 private:
  struct Stack {
    Stack(NodeId id, double energy, const RoutingConfig& cfg, Engine& engine, Trace& trace, MessageTransport& t)
        : table(id), discovery(id, energy, cfg, table, engine, trace, t), routing(id, cfg, table, discovery, engine, trace, t) {}
    RoutingTable table;
    DiscoveryManager discovery;
    RoutingManager routing;
  };

  Stack& stack(NodeId id);

  NetworkConfig config_;
  Engine engine_;
  Trace trace_;
  Topology topology_;
  RandomSource random_;
  std::unique_ptr<LinkLayer> link_;
  TransportRegistry transports_;
  std::unique_ptr<DataTransferManager> transfer_;
  std::unique_ptr<ConnectionManager> connections_;
  std::unique_ptr<AppDataManager> app_;
  std::vector<std::unique_ptr<Stack>> stacks_;
};

}  // namespace wfd
