#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "wfd/random.hpp"

#ifndef WFD_SCENARIO_DIR
#error "WFD_SCENARIO_DIR must point at the bundled scenarios"
#endif

namespace wfd::testing {

std::filesystem::path scenario_path(std::string_view name) {
  return std::filesystem::path(WFD_SCENARIO_DIR) / (std::string(name) + ".yaml");
}

Scenario load_bundled(std::string_view name) { return load_scenario(scenario_path(name)).scenario; }

TableSnapshot snapshot_tables(Network& net) {
  TableSnapshot out;
  for (std::uint32_t i = 0; i < net.size(); ++i) {
    const NodeId id{i};
    auto& row = out[net.name(id)];
    for (const auto& e : net.table(id).entries()) {
      if (e.valid()) row[net.name(e.destination)] = e.hop_count;
    }
  }
  return out;
}

Scenario random_graph_scenario(std::uint64_t seed, std::size_t max_nodes) {
  RandomStream rng(mix64(seed ^ 0x6f7261636c65ULL));
  const std::size_t n = 2 + rng.uniform_int(max_nodes - 1);
  const std::size_t owners = 1 + rng.uniform_int(n / 2);

  Scenario s;
  s.name = "random_graph_" + std::to_string(seed);
  s.seed = seed;
  s.duration = std::chrono::seconds(45);
  s.advert_start = sim_time_us(10'000'000);

  constexpr std::array<std::uint64_t, 3> kRates = {54'000'000, 125'000'000, 250'000'000};
  for (std::size_t i = 0; i < n; ++i) {
    NodeSpec spec;
    spec.name = "N" + std::to_string(i);
    const double r = 80.0 * std::sqrt(rng.uniform_real());
    const double theta = 2.0 * std::numbers::pi * rng.uniform_real();
    spec.position = {r * std::cos(theta), r * std::sin(theta)};
    spec.radio.data_rate_bps = kRates[rng.uniform_int(kRates.size())];
    spec.radio.per_hop_mac_latency = Duration{1000 + static_cast<std::int64_t>(rng.uniform_int(4001))};
    spec.energy_cost = 0.5 * static_cast<double>(1 + rng.uniform_int(8));
    spec.go_intent = i < owners ? 12 : 2;
    s.nodes.push_back(std::move(spec));
  }

  // Each owner gets one client by negotiation; the remaining clients join a
  // random owner later.
  const auto at = [](std::int64_t sec) { return sim_time_us(sec * 1'000'000); };
  for (std::size_t g = 0; g < owners; ++g) {
    s.groups.push_back({GroupDirective::Kind::kConnect, at(0), s.nodes[owners + g].name, s.nodes[g].name});
  }
  for (std::size_t c = 2 * owners; c < n; ++c) {
    const std::size_t g = rng.uniform_int(owners);
    s.groups.push_back({GroupDirective::Kind::kJoin, at(5), s.nodes[c].name, s.nodes[g].name});
  }
  // A random spanning tree over the owners plus some extra bridges.
  for (std::size_t g = 1; g < owners; ++g) {
    const std::size_t other = rng.uniform_int(g);
    s.groups.push_back({GroupDirective::Kind::kBridge, at(8), s.nodes[g].name, s.nodes[other].name});
    for (std::size_t h = 0; h < g; ++h) {
      if (h != other && rng.uniform_real() < 0.4) {
        s.groups.push_back({GroupDirective::Kind::kBridge, at(8), s.nodes[g].name, s.nodes[h].name});
      }
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      const auto cls = (a + b) % 2 == 0 ? TrafficClass::kRealTime : TrafficClass::kBulk;
      s.traffic.push_back({at(40), s.nodes[a].name, s.nodes[b].name, 4096, cls});
    }
  }
  return s;
}

OracleGraph oracle_graph(Network& net, const std::vector<NodeSpec>& specs) {
  OracleGraph g;
  g.n = specs.size();
  g.adj.resize(g.n);
  g.latency_us.assign(g.n, std::vector<std::int64_t>(g.n, 0));
  for (const auto& spec : specs) g.cost.push_back(spec.energy_cost);

  for (std::size_t u = 0; u < g.n; ++u) {
    for (NodeId peer : net.link().link_peers(NodeId{static_cast<std::uint32_t>(u)})) g.adj[u].push_back(peer.value);
    for (std::size_t v : g.adj[u]) {
      // Half the round trip of a 256-bit discovery request and its 320-bit
      // response, each at the slower rate plus the larger MAC latency.
      const auto rate = std::min(specs[u].radio.data_rate_bps, specs[v].radio.data_rate_bps);
      const auto mac = std::max(specs[u].radio.per_hop_mac_latency, specs[v].radio.per_hop_mac_latency).count();
      g.latency_us[u][v] = (airtime_us(256, rate) + mac + airtime_us(320, rate) + mac) / 2;
    }
  }
  return g;
}

OracleReport compare_with_oracle(Network& net, const OracleGraph& g) {
  OracleReport report;
  auto note = [&](const std::string& what) {
    if (report.mismatches++ == 0) report.first_mismatch = what;
  };
  for (std::size_t u = 0; u < g.n; ++u) {
    const NodeId uid{static_cast<std::uint32_t>(u)};
    for (std::size_t d = 0; d < g.n; ++d) {
      if (d == u) continue;
      ++report.pairs;
      const NodeId did{static_cast<std::uint32_t>(d)};
      const auto expect_lat = realtime_oracle(g, u, d);
      const auto expect_energy = bulk_oracle(g, u, d);
      const auto hops = hop_distance(g, u, d);
      const auto rt = net.table(uid).select_route(did, TrafficClass::kRealTime);
      const auto bulk = net.table(uid).select_route(did, TrafficClass::kBulk);
      std::ostringstream where;
      where << net.name(uid) << "->" << net.name(did) << ": ";
      if (!rt || !bulk || !expect_lat || !expect_energy) {
        note(where.str() + "route or oracle missing");
        continue;
      }
      if (rt->hop_count != *hops || rt->latency.count() != *expect_lat) {
        std::ostringstream msg;
        msg << where.str() << "real_time hops=" << rt->hop_count << " lat=" << rt->latency.count()
            << " oracle hops=" << *hops << " lat=" << *expect_lat;
        note(msg.str());
      }
      if (bulk->hop_count != *hops || std::abs(bulk->energy_cost - *expect_energy) > 1e-9) {
        std::ostringstream msg;
        msg << where.str() << "bulk energy=" << bulk->energy_cost << " oracle=" << *expect_energy;
        note(msg.str());
      }
    }
  }
  return report;
}

bool loop_free(const std::vector<TraceRecord>& records, std::string* detail) {
  std::map<std::string, std::set<std::string>> visited;
  for (const auto& r : records) {
    if (r.event_class != EventClass::kForward || r.field_or("kind", "") != "data") continue;
    const std::string flow(r.field_or("flow", ""));
    if (!visited[flow].insert(r.node).second) {
      if (detail != nullptr) *detail = "flow " + flow + " revisits " + r.node + " at " + std::to_string(r.time_us);
      return false;
    }
  }
  return true;
}

}  // namespace wfd::testing
