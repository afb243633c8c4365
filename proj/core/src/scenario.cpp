#include "wfd/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>

namespace wfd {
namespace {

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  std::string where(const YAML::Mark& mark) const {
    if (mark.is_null()) return source_;
    return source_ + ":" + std::to_string(mark.line + 1) + ":" + std::to_string(mark.column + 1);
  }

  [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
    throw ScenarioError(where(node.Mark()) + ": " + message);
  }

  void require_map(const YAML::Node& node, std::string_view context) const {
    if (!node.IsMap()) fail(node, std::string(context) + " must be a mapping");
  }

  void check_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
                  std::string_view context) const {
    require_map(map, context);
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(kv.first, "unknown field '" + key + "' in " + std::string(context));
      }
    }
  }

  YAML::Node required(const YAML::Node& map, const char* key, std::string_view context) const {
    YAML::Node v = map[key];
    if (!v) fail(map, "missing field '" + std::string(key) + "' in " + std::string(context));
    return v;
  }

  std::string text(const YAML::Node& v, std::string_view what) const {
    if (!v.IsScalar()) fail(v, std::string(what) + " must be a scalar");
    return v.as<std::string>();
  }

  double number(const YAML::Node& v, std::string_view what) const {
    if (!v.IsScalar()) fail(v, std::string(what) + " must be a number");
    double d = 0.0;
    if (!YAML::convert<double>::decode(v, d) || !std::isfinite(d)) fail(v, std::string(what) + " must be a finite number");
    return d;
  }

  std::int64_t integer(const YAML::Node& v, std::string_view what) const {
    if (!v.IsScalar()) fail(v, std::string(what) + " must be an integer");
    std::int64_t i = 0;
    if (!YAML::convert<std::int64_t>::decode(v, i)) fail(v, std::string(what) + " must be an integer");
    return i;
  }

  std::uint64_t non_negative(const YAML::Node& v, std::string_view what) const {
    const std::int64_t i = integer(v, what);
    if (i < 0) fail(v, std::string(what) + " must be >= 0");
    return static_cast<std::uint64_t>(i);
  }

  // Seconds (fractional allowed) to whole microseconds.
  Duration seconds(const YAML::Node& v, std::string_view what) const {
    const double s = number(v, what);
    if (s < 0) fail(v, std::string(what) + " must be >= 0");
    return Duration{std::llround(s * 1e6)};
  }

  Duration millis(const YAML::Node& v, std::string_view what) const {
    const double ms = number(v, what);
    if (ms < 0) fail(v, std::string(what) + " must be >= 0");
    return Duration{std::llround(ms * 1e3)};
  }

  Position position(const YAML::Node& v, std::string_view what) const {
    if (!v.IsSequence() || v.size() != 2) fail(v, std::string(what) + " must be a two-element list [x, y]");
    return Position{number(v[0], what), number(v[1], what)};
  }

  std::pair<std::string, std::string> node_pair(const YAML::Node& v, std::string_view what) const {
    if (!v.IsSequence() || v.size() != 2) fail(v, std::string(what) + " must list exactly two node ids");
    return {text(v[0], what), text(v[1], what)};
  }

 private:
  std::string source_;
};

void parse_sim(const Parser& p, const YAML::Node& sim, Scenario& s) {
  p.check_keys(sim,
               {"seed", "duration_s", "advert_start_s", "advert_period_ms", "full_dump_interval", "ttl",
                "report_timeout_s", "bridging", "timing"},
               "sim");
  if (auto v = sim["seed"]) s.seed = p.non_negative(v, "sim.seed");
  if (auto v = sim["duration_s"]) s.duration = p.seconds(v, "sim.duration_s");
  if (s.duration <= Duration::zero()) p.fail(sim, "sim.duration_s must be > 0");
  if (auto v = sim["advert_start_s"]) s.advert_start = SimTime{p.seconds(v, "sim.advert_start_s")};

  RoutingConfig& r = s.network.routing;
  if (auto v = sim["advert_period_ms"]) {
    r.advert_period = p.millis(v, "sim.advert_period_ms");
    if (r.advert_period <= Duration::zero()) p.fail(v, "sim.advert_period_ms must be > 0");
  }
  if (auto v = sim["full_dump_interval"]) {
    const auto n = p.non_negative(v, "sim.full_dump_interval");
    if (n == 0 || n > 1'000'000) p.fail(v, "sim.full_dump_interval must be in 1..1000000");
    r.full_dump_interval = static_cast<std::uint32_t>(n);
  }
  if (auto v = sim["ttl"]) {
    const auto ttl = p.non_negative(v, "sim.ttl");
    if (ttl == 0 || ttl > 255) p.fail(v, "sim.ttl must be in 1..255");
    r.default_ttl = static_cast<std::uint32_t>(ttl);
  }
  if (auto v = sim["report_timeout_s"]) {
    s.network.report_timeout = p.seconds(v, "sim.report_timeout_s");
    if (s.network.report_timeout <= Duration::zero()) p.fail(v, "sim.report_timeout_s must be > 0");
  }
  if (auto v = sim["bridging"]) {
    const auto b = p.text(v, "sim.bridging");
    if (b == "go_as_legacy_client") {
      s.network.link.bridging = BridgingPolicy::kGoAsLegacyClient;
    } else if (b == "none") {
      s.network.link.bridging = BridgingPolicy::kNone;
    } else {
      p.fail(v, "sim.bridging must be 'go_as_legacy_client' or 'none'");
    }
  }
  if (auto t = sim["timing"]) {
    p.check_keys(t,
                 {"scan_ms", "find_leg_min_ms", "find_leg_max_ms", "discovery_timeout_ms", "probe_overlap_ms",
                  "wps_auth_ms", "keepalive_period_ms", "keepalive_miss_limit"},
                 "sim.timing");
    LinkTiming& lt = s.network.link.timing;
    if (auto v = t["scan_ms"]) lt.scan = p.millis(v, "timing.scan_ms");
    if (auto v = t["find_leg_min_ms"]) lt.find_leg_min = p.millis(v, "timing.find_leg_min_ms");
    if (auto v = t["find_leg_max_ms"]) lt.find_leg_max = p.millis(v, "timing.find_leg_max_ms");
    if (auto v = t["discovery_timeout_ms"]) lt.discovery_timeout = p.millis(v, "timing.discovery_timeout_ms");
    if (auto v = t["probe_overlap_ms"]) lt.probe_overlap = p.millis(v, "timing.probe_overlap_ms");
    if (auto v = t["wps_auth_ms"]) lt.wps_auth = p.millis(v, "timing.wps_auth_ms");
    if (auto v = t["keepalive_period_ms"]) lt.keepalive_period = p.millis(v, "timing.keepalive_period_ms");
    if (auto v = t["keepalive_miss_limit"]) {
      const auto n = p.non_negative(v, "timing.keepalive_miss_limit");
      if (n == 0 || n > 1000) p.fail(v, "timing.keepalive_miss_limit must be in 1..1000");
      lt.keepalive_miss_limit = static_cast<int>(n);
    }
    if (lt.find_leg_min > lt.find_leg_max) p.fail(t, "timing.find_leg_min_ms exceeds timing.find_leg_max_ms");
    if (lt.keepalive_period <= Duration::zero()) p.fail(t, "timing.keepalive_period_ms must be > 0");
  }
}

NodeSpec parse_node(const Parser& p, const YAML::Node& n) {
  p.check_keys(n, {"id", "position", "go_intent", "energy_cost", "channel", "radio"}, "node");
  NodeSpec spec;
  spec.name = p.text(p.required(n, "id", "node"), "node.id");
  if (spec.name.empty() || spec.name.find_first_of(" \t\r\n=,/#") != std::string::npos) {
    p.fail(n["id"], "node id '" + spec.name + "' must be non-empty and free of whitespace and = , / #");
  }
  spec.position = p.position(p.required(n, "position", "node"), "node.position");
  if (auto v = n["go_intent"]) {
    const auto i = p.integer(v, "node.go_intent");
    if (i < 0 || i > kMaxGoIntent) p.fail(v, "go_intent must be in 0..15");
    spec.go_intent = static_cast<int>(i);
  }
  if (auto v = n["energy_cost"]) {
    spec.energy_cost = p.number(v, "node.energy_cost");
    if (spec.energy_cost < 0) p.fail(v, "energy_cost must be >= 0");
  }
  if (auto v = n["channel"]) {
    const auto c = p.integer(v, "node.channel");
    if (std::find(kSocialChannels.begin(), kSocialChannels.end(), c) == kSocialChannels.end()) {
      p.fail(v, "channel must be 1, 6 or 11");
    }
    spec.channel = static_cast<int>(c);
  }
  if (auto r = n["radio"]) {
    p.check_keys(r, {"range_m", "data_rate_mbps", "mac_latency_ms"}, "node.radio");
    if (auto v = r["range_m"]) {
      spec.radio.range_m = p.number(v, "radio.range_m");
      if (spec.radio.range_m <= 0) p.fail(v, "radio.range_m must be > 0");
    }
    if (auto v = r["data_rate_mbps"]) {
      const double mbps = p.number(v, "radio.data_rate_mbps");
      if (mbps <= 0) p.fail(v, "radio.data_rate_mbps must be > 0");
      spec.radio.data_rate_bps = static_cast<std::uint64_t>(std::llround(mbps * 1e6));
    }
    if (auto v = r["mac_latency_ms"]) spec.radio.per_hop_mac_latency = p.millis(v, "radio.mac_latency_ms");
  }
  return spec;
}

}  // namespace

ScenarioLoad parse_scenario(std::string_view text, const std::string& source_name, const LoadOptions& options) {
  const Parser p(source_name);
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(p.where(e.mark) + ": parse error: " + e.msg);
  }
  if (!root || root.IsNull()) throw ScenarioError(source_name + ": empty scenario");

  ScenarioLoad out;
  Scenario& s = out.scenario;
  auto warn = [&](const YAML::Mark& mark, const std::string& msg) { out.warnings.push_back(p.where(mark) + ": " + msg); };

  try {
    p.check_keys(root, {"name", "sim", "nodes", "groups", "auto_chain", "mobility", "traffic"}, "scenario");
    if (auto v = root["name"]) s.name = p.text(v, "name");
    if (auto v = root["sim"]) parse_sim(p, v, s);

    // Nodes.
    const YAML::Node nodes = p.required(root, "nodes", "scenario");
    if (!nodes.IsSequence() || nodes.size() == 0) p.fail(nodes, "nodes must be a non-empty list");
    std::map<std::string, YAML::Mark> seen;
    for (const auto& n : nodes) {
      NodeSpec spec = parse_node(p, n);
      if (auto [it, fresh] = seen.emplace(spec.name, n.Mark()); !fresh) {
        p.fail(n, "duplicate node id '" + spec.name + "' (first defined at " + p.where(it->second) + ")");
      }
      s.nodes.push_back(std::move(spec));
    }
    auto check_ref = [&](const YAML::Node& at, const std::string& id) {
      if (!seen.contains(id)) p.fail(at, "unknown node id '" + id + "'");
    };
    auto check_time = [&](const YAML::Node& at, SimTime t, std::string_view what) {
      if (t.time_since_epoch() > s.duration) {
        p.fail(at, std::string(what) + " time " + format_double(to_us(t) / 1e6) + " s is past the simulation end");
      }
    };
    check_time(root["sim"] ? root["sim"] : root, s.advert_start, "advert_start");

    // Group directives.
    if (auto groups = root["groups"]) {
      if (!groups.IsSequence()) p.fail(groups, "groups must be a list");
      for (const auto& g : groups) {
        p.check_keys(g, {"at_s", "connect", "join", "bridge"}, "group directive");
        GroupDirective d;
        d.at = SimTime{p.seconds(p.required(g, "at_s", "group directive"), "at_s")};
        int kinds = 0;
        for (auto [key, kind] : {std::pair{"connect", GroupDirective::Kind::kConnect},
                                 std::pair{"join", GroupDirective::Kind::kJoin},
                                 std::pair{"bridge", GroupDirective::Kind::kBridge}}) {
          if (auto v = g[key]) {
            ++kinds;
            d.kind = kind;
            std::tie(d.local, d.peer) = p.node_pair(v, key);
            check_ref(v, d.local);
            check_ref(v, d.peer);
            if (d.local == d.peer) p.fail(v, "a node cannot connect to itself");
          }
        }
        if (kinds != 1) p.fail(g, "group directive needs exactly one of connect, join, bridge");
        check_time(g, d.at, "group directive");
        s.groups.push_back(std::move(d));
      }
    }
    if (auto chain = root["auto_chain"]) {
      p.check_keys(chain, {"at_s", "bridge_at_s"}, "auto_chain");
      const SimTime at{p.seconds(p.required(chain, "at_s", "auto_chain"), "auto_chain.at_s")};
      const SimTime bridge_at{p.seconds(p.required(chain, "bridge_at_s", "auto_chain"), "auto_chain.bridge_at_s")};
      check_time(chain, at, "auto_chain");
      check_time(chain, bridge_at, "auto_chain bridge");
      if (bridge_at < at) p.fail(chain, "auto_chain.bridge_at_s precedes auto_chain.at_s");
      for (std::size_t i = 0; i + 1 < s.nodes.size(); i += 2) {
        s.groups.push_back({GroupDirective::Kind::kConnect, at, s.nodes[i].name, s.nodes[i + 1].name});
      }
      for (std::size_t i = 1; i + 1 < s.nodes.size(); i += 2) {
        s.groups.push_back({GroupDirective::Kind::kBridge, bridge_at, s.nodes[i].name, s.nodes[i + 1].name});
      }
    }
    std::stable_sort(s.groups.begin(), s.groups.end(), [](const auto& a, const auto& b) { return a.at < b.at; });

    // Mobility.
    if (auto mob = root["mobility"]) {
      if (!mob.IsSequence()) p.fail(mob, "mobility must be a list");
      for (const auto& m : mob) {
        p.check_keys(m, {"at_s", "node", "to"}, "mobility step");
        MoveDirective d;
        d.at = SimTime{p.seconds(p.required(m, "at_s", "mobility step"), "at_s")};
        d.node = p.text(p.required(m, "node", "mobility step"), "node");
        check_ref(m["node"], d.node);
        d.to = p.position(p.required(m, "to", "mobility step"), "to");
        check_time(m, d.at, "mobility step");
        s.mobility.push_back(std::move(d));
      }
    }

    // Traffic.
    if (auto traffic = root["traffic"]) {
      if (!traffic.IsSequence()) p.fail(traffic, "traffic must be a list");
      for (const auto& t : traffic) {
        p.check_keys(t, {"at_s", "src", "dst", "payload_bits", "class"}, "traffic entry");
        TrafficDirective d;
        d.at = SimTime{p.seconds(p.required(t, "at_s", "traffic entry"), "at_s")};
        d.src = p.text(p.required(t, "src", "traffic entry"), "src");
        d.dst = p.text(p.required(t, "dst", "traffic entry"), "dst");
        check_ref(t["src"], d.src);
        check_ref(t["dst"], d.dst);
        if (auto v = t["payload_bits"]) d.payload_bits = p.non_negative(v, "payload_bits");
        if (auto v = t["class"]) {
          const auto cls = parse_traffic_class(p.text(v, "class"));
          if (!cls) p.fail(v, "class must be 'real_time' or 'bulk'");
          d.traffic_class = *cls;
        }
        check_time(t, d.at, "traffic entry");
        if (d.at < s.advert_start && d.src != d.dst) {
          warn(t.Mark(), "traffic from " + d.src + " is sent before adverts start and can only reach direct links");
        }
        s.traffic.push_back(std::move(d));
      }
    }
  } catch (const YAML::Exception& e) {
    throw ScenarioError(p.where(e.mark) + ": " + e.msg);
  }

  if (s.name.empty()) s.name = source_name;
  if (options.strict && !out.warnings.empty()) {
    std::ostringstream msg;
    for (std::size_t i = 0; i < out.warnings.size(); ++i) msg << (i ? "\n" : "") << out.warnings[i];
    throw ScenarioError(msg.str());
  }
  return out;
}

ScenarioLoad load_scenario(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string(), options);
}

}  // namespace wfd
