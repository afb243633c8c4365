#include "wfd/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace wfd {

Network::Network(const NetworkConfig& config, const std::vector<NodeSpec>& nodes)
    : config_(config), random_(config.seed) {
  link_ = std::make_unique<LinkLayer>(engine_, topology_, trace_, random_, config_.link);
  std::uint64_t rate = RadioProfile{}.data_rate_bps;
  for (const auto& spec : nodes) rate = std::min(rate, spec.radio.data_rate_bps);
  transports_.add(std::make_unique<WifiDirectTransport>(*link_, rate));
  transports_.add(std::make_unique<StubTransport>(TechnologyId::kZigbee));
  transports_.add(std::make_unique<StubTransport>(TechnologyId::kBluetooth));

  transfer_ = std::make_unique<DataTransferManager>(transports_, trace_);
  connections_ = std::make_unique<ConnectionManager>(engine_, topology_, *link_, trace_);
  app_ = std::make_unique<AppDataManager>(engine_, trace_, config_.report_timeout);
  link_->add_observer(transfer_.get());
  link_->add_observer(connections_.get());

  for (const auto& spec : nodes) {
    if (spec.name.empty()) throw std::invalid_argument("node name must not be empty");
    if (trace_.lookup(spec.name)) throw std::invalid_argument("duplicate node name: " + spec.name);
    const NodeId id = topology_.add_node(spec.position, spec.radio);
    trace_.register_node(id, spec.name);
    link_->add_device(id, spec.go_intent, spec.channel);
    auto s = std::make_unique<Stack>(id, spec.energy_cost, config_.routing, engine_, trace_, *transfer_);
    transfer_->register_node(id, s->discovery, s->routing);
    app_->register_node(id, s->routing);
    stacks_.push_back(std::move(s));
  }
}

NodeId Network::id(std::string_view name) const {
  const auto id = trace_.lookup(name);
  if (!id) throw std::out_of_range("unknown node: " + std::string(name));
  return *id;
}

Network::Stack& Network::stack(NodeId id) {
  if (id.value >= stacks_.size()) throw UnknownNodeError(id);
  return *stacks_[id.value];
}

void Network::start_adverts(SimTime first_tick) {
  for (auto& s : stacks_) s->discovery.start_adverts(first_tick);
}

void Network::move(NodeId node, Position pos) {
  for (const RangeChange& change : topology_.apply_move(node, pos)) link_->handle_range_change(change);
}

void Network::schedule_move(SimTime at, NodeId node, Position pos) {
  engine_.schedule_at(at, EventKind::kMobilityStep, node, [this, node, pos] { move(node, pos); });
}

void Network::schedule_connect(SimTime at, NodeId local, NodeId peer) {
  engine_.schedule_at(at, EventKind::kTimer, local, [this, local, peer] {
    try {
      connections_->connect(local, peer);
    } catch (const ConnectionError& e) {
      // RoleConflict and policy failures are traced by connect() itself.
      if (e.code() != ConnectionErrorCode::kRoleConflict) {
        trace_.record(engine_.now(), local, EventClass::kConnect,
                      std::move(Fields{}
                                    .add("action", "failed")
                                    .add("peer", trace_.name(peer))
                                    .add("reason", e.code() == ConnectionErrorCode::kOutOfRange ? "out_of_range"
                                                                                                 : "invalid_params")));
      }
    }
  });
}

void Network::schedule_send(SimTime at, NodeId src, NodeId dst, std::uint64_t payload_bits, TrafficClass cls) {
  engine_.schedule_at(at, EventKind::kAppSend, src,
                      [this, src, dst, payload_bits, cls] { app_->app_send(src, dst, payload_bits, cls); });
}

}  // namespace wfd
