#pragma once

#include <any>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "wfd/engine.hpp"
#include "wfd/random.hpp"
#include "wfd/topology.hpp"
#include "wfd/trace.hpp"
#include "wfd/types.hpp"

namespace wfd {

enum class DeviceState : std::uint8_t {
  kIdle,
  kScan,
  kFindSearch,
  kFindListen,
  kNegotiating,
  kGroupOwner,
  kGroupClient,
};

std::string_view to_string(DeviceState s);

enum class BridgingPolicy : std::uint8_t {
  // A GO may additionally attach to a neighbouring group as a legacy client,
  // giving one extra logical GO<->GO link (concurrent mode, abstracted).
  kGoAsLegacyClient,
  kNone,
};

inline constexpr int kMaxGoIntent = 15;
inline constexpr std::array<int, 3> kSocialChannels = {1, 6, 11};

struct GoNegotiationParams {
  int intent = 7;
  bool tie_breaker = false;
};

enum class GoRole : std::uint8_t { kInitiator, kResponder };

// Higher intent wins; on equal intent the initiator wins iff its tie-breaker
// bit is set. Both at 15 is a conflict and yields nullopt.
std::optional<GoRole> resolve_go_role(const GoNegotiationParams& initiator, const GoNegotiationParams& responder);

struct Group {
  GroupId id = 0;
  NodeId owner;
  std::set<NodeId> clients;
  // GOs of other groups attached under the bridging policy.
  std::set<NodeId> legacy_clients;
  int channel = 6;
  // Link-local address index per member; the owner always holds 1.
  std::map<NodeId, int> addresses;
  int next_address = 2;

  bool is_member(NodeId n) const { return n == owner || clients.contains(n) || legacy_clients.contains(n); }
  // Everyone except the owner.
  std::vector<NodeId> members() const;
};

struct Frame {
  NodeId src;
  std::optional<NodeId> dst;  // nullopt: broadcast
  GroupId group = 0;
  std::uint64_t size_bits = 1;
  std::any payload;
  // Extra fields appended to the DROP record if the frame is lost.
  TraceFields trace_tag;

  bool broadcast() const { return !dst.has_value(); }
};

enum class LinkStatus : std::uint8_t {
  kOk,
  kForbiddenByRole,
  kNotInGroup,
  kLost,
  kNoLink,
};

std::string_view to_string(LinkStatus s);

struct DeliveryResult {
  LinkStatus status = LinkStatus::kOk;
  std::vector<NodeId> recipients;
};

enum class ProbeOutcome : std::uint8_t { kDiscovered, kNotYet };

enum class LinkErrorCode : std::uint8_t {
  kInvalidState,
  kAlreadyInGroup,
  kNotDiscovered,
  kOutOfRange,
  kNotGroupOwner,
  kPolicyDisabled,
  kUnknownGroup,
  kInvalidParams,
};

class LinkError : public std::runtime_error {
 public:
  LinkError(LinkErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  LinkErrorCode code() const { return code_; }

 private:
  LinkErrorCode code_;
};

struct LinkTiming {
  Duration scan = std::chrono::milliseconds(500);
  Duration find_leg_min = std::chrono::milliseconds(100);
  Duration find_leg_max = std::chrono::milliseconds(300);
  Duration discovery_timeout = std::chrono::seconds(10);
  // A search leg and a listen leg must overlap this long for the probe
  // request/response pair to complete.
  Duration probe_overlap = std::chrono::milliseconds(20);
  Duration wps_auth = std::chrono::milliseconds(200);
  Duration keepalive_period = std::chrono::seconds(1);
  int keepalive_miss_limit = 3;
};

struct LinkConfig {
  LinkTiming timing;
  BridgingPolicy bridging = BridgingPolicy::kGoAsLegacyClient;
  std::uint64_t negotiation_frame_bits = 512;
};

// Callbacks from the link layer. All run inside engine event handlers.
class LinkObserver {
 public:
  virtual ~LinkObserver() = default;
  virtual void on_link_up(NodeId /*node*/, NodeId /*peer*/) {}
  virtual void on_link_down(NodeId /*node*/, NodeId /*peer*/) {}
  virtual void on_frame(NodeId /*at*/, const Frame& /*frame*/) {}
  virtual void on_frame_lost(const Frame& /*frame*/, NodeId /*intended*/) {}
  virtual void on_discovered(NodeId /*node*/, NodeId /*peer*/) {}
  virtual void on_discovery_timeout(NodeId /*node*/) {}
  // owner is nullopt when negotiation failed.
  virtual void on_negotiation_done(NodeId /*initiator*/, NodeId /*responder*/, std::optional<NodeId> /*owner*/) {}
};

// Wi-Fi Direct model for every device in one simulation: Scan/Find device
// discovery, standard GO negotiation, group lifecycle with GO-assigned
// addresses, and the frame delivery rules (clients talk only to their GO).
class LinkLayer {
 public:
  LinkLayer(Engine& engine, Topology& topology, Trace& trace, const RandomSource& random, LinkConfig config = {});
  LinkLayer(const LinkLayer&) = delete;
  LinkLayer& operator=(const LinkLayer&) = delete;

  void add_device(NodeId id, int go_intent, int listen_channel = 6);
  void add_observer(LinkObserver* observer) { observers_.push_back(observer); }
  const LinkConfig& config() const { return config_; }

  DeviceState state(NodeId id) const { return device(id).state; }
  int go_intent(NodeId id) const { return device(id).intent; }
  int channel(NodeId id) const { return device(id).channel; }

  // --- discovery ---------------------------------------------------------
  void start_discovery(NodeId node);
  // Adds `peer` to the set the node is looking for, starting discovery when
  // the node is idle. A session with no wanted peers ends on the first find.
  void want_peer(NodeId node, NodeId peer);
  bool discovering(NodeId node) const;
  ProbeOutcome probe_exchange(NodeId a, NodeId b) const;
  const std::set<NodeId>& discovered_peers(NodeId node) const { return device(node).discovered; }

  // --- negotiation and groups ---------------------------------------------
  // Starts the Request/Response/Confirm exchange. The initiator draws its
  // tie-breaker bit unless one is supplied.
  void negotiate_go(NodeId initiator, NodeId responder, std::optional<bool> tie_breaker = std::nullopt);

  void join_group(NodeId client, GroupId group);
  // A GO leaving dissolves its group; a client leaving removes only itself.
  void leave_group(NodeId node);
  void dissolve_group(GroupId group);
  void bridge_attach(NodeId go_node, GroupId foreign_group);
  void bridge_detach(NodeId go_node, GroupId foreign_group);

  const Group* find_group(GroupId id) const;
  std::vector<const Group*> groups() const;
  std::optional<GroupId> owned_group(NodeId node) const { return device(node).owned; }
  std::optional<GroupId> client_group(NodeId node) const { return device(node).client_of; }
  const std::set<GroupId>& bridged_groups(NodeId node) const { return device(node).bridged; }
  std::vector<GroupId> memberships(NodeId node) const;

  // --- frames --------------------------------------------------------------
  DeliveryResult deliver_frame(Frame frame);
  // Picks the group through which src may reach dst and delivers there.
  DeliveryResult unicast(NodeId src, NodeId dst, std::uint64_t size_bits, std::any payload, TraceFields tag = {});
  // One broadcast per group the node belongs to.
  DeliveryResult broadcast(NodeId src, std::uint64_t size_bits, std::any payload, TraceFields tag = {});

  // Role check only (range is evaluated at delivery time).
  bool can_deliver(NodeId a, NodeId b) const;
  std::vector<NodeId> link_peers(NodeId node) const;

  // Topology notification for one pair whose reachability changed.
  void handle_range_change(const RangeChange& change);

  // Test hook: number of copies of `frame` to hand to `at` (0 drops it).
  void set_frame_filter(std::function<int(const Frame&, NodeId)> filter) { filter_ = std::move(filter); }

 private:
  struct Leg {
    DeviceState state = DeviceState::kIdle;
    SimTime start{};
    SimTime end{};
    std::uint64_t serial = 0;
  };

  struct Device {
    int intent = 7;
    int channel = 6;
    DeviceState state = DeviceState::kIdle;
    RandomStream rng{0};
    bool registered = false;

    std::set<NodeId> wanted;
    std::set<NodeId> discovered;
    Leg leg;
    std::uint64_t next_leg_serial = 1;
    EventHandle leg_timer;
    EventHandle timeout_timer;

    std::optional<GroupId> owned;
    std::optional<GroupId> client_of;
    std::set<GroupId> bridged;
  };

  struct GroupState {
    Group group;
    std::map<NodeId, int> misses;
    EventHandle keepalive;
  };

  Device& device(NodeId id);
  const Device& device(NodeId id) const;
  GroupState* group_state(GroupId id);

  void trace(NodeId node, EventClass cls, Fields fields);

  void begin_find_leg(NodeId node, DeviceState leg_state);
  void check_overlaps(NodeId node);
  void on_probe_success(NodeId a, std::uint64_t leg_a, NodeId b, std::uint64_t leg_b);
  void end_discovery(NodeId node);

  void send_negotiation_frame(NodeId from, NodeId to, std::function<void()> on_arrival, std::function<void()> on_lost);
  void fail_negotiation(NodeId initiator, NodeId responder, std::string_view reason);
  void form_group(NodeId initiator, NodeId responder, NodeId owner);

  void keepalive_tick(GroupId id);
  void remove_member(GroupState& gs, NodeId member, std::string_view reason);

  void deliver_to(const Frame& frame, NodeId recipient);
  void notify_link(NodeId a, NodeId b, bool up);

  Engine& engine_;
  Topology& topology_;
  Trace& trace_;
  const RandomSource& random_;
  LinkConfig config_;
  std::vector<Device> devices_;
  std::map<GroupId, GroupState> groups_;
  GroupId next_group_id_ = 1;
  std::vector<LinkObserver*> observers_;
  std::function<int(const Frame&, NodeId)> filter_;
};

}  // namespace wfd
