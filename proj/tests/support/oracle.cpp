#include "oracle.hpp"

#include <algorithm>
#include <deque>
#include <tuple>

namespace wfd::testing {

std::vector<std::vector<std::size_t>> simple_paths(const OracleGraph& g, std::size_t src, std::size_t dst) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> path{src};
  std::vector<bool> on_path(g.n, false);
  on_path[src] = true;

  auto dfs = [&](auto&& self, std::size_t u) -> void {
    if (u == dst) {
      out.push_back(path);
      return;
    }
    for (std::size_t v : g.adj[u]) {
      if (on_path[v]) continue;
      on_path[v] = true;
      path.push_back(v);
      self(self, v);
      path.pop_back();
      on_path[v] = false;
    }
  };
  dfs(dfs, src);
  return out;
}

PathMetric path_metric(const OracleGraph& g, const std::vector<std::size_t>& path) {
  PathMetric m;
  m.hops = static_cast<std::uint32_t>(path.size() - 1);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) m.latency_us += g.latency_us[path[i]][path[i + 1]];
  for (std::size_t i = path.size() - 1; i >= 1; --i) m.energy += g.cost[path[i]];
  return m;
}

std::optional<std::uint32_t> hop_distance(const OracleGraph& g, std::size_t src, std::size_t dst) {
  std::vector<int> dist(g.n, -1);
  std::deque<std::size_t> queue{src};
  dist[src] = 0;
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (std::size_t v : g.adj[u]) {
      if (dist[v] >= 0) continue;
      dist[v] = dist[u] + 1;
      queue.push_back(v);
    }
  }
  if (dist[dst] < 0) return std::nullopt;
  return static_cast<std::uint32_t>(dist[dst]);
}

std::optional<PathMetric> lex_best(const OracleGraph& g, std::size_t src, std::size_t dst) {
  std::optional<PathMetric> best;
  for (const auto& p : simple_paths(g, src, dst)) {
    const PathMetric m = path_metric(g, p);
    if (!best || std::tie(m.hops, m.latency_us, m.energy) < std::tie(best->hops, best->latency_us, best->energy)) {
      best = m;
    }
  }
  return best;
}

std::optional<std::int64_t> realtime_oracle(const OracleGraph& g, std::size_t src, std::size_t dst) {
  const auto h = hop_distance(g, src, dst);
  if (!h) return std::nullopt;
  std::optional<std::int64_t> best;
  for (const auto& p : simple_paths(g, src, dst)) {
    if (p.size() - 1 != *h) continue;
    const auto lat = path_metric(g, p).latency_us;
    if (!best || lat < *best) best = lat;
  }
  return best;
}

std::optional<double> bulk_oracle(const OracleGraph& g, std::size_t src, std::size_t dst) {
  const auto h = hop_distance(g, src, dst);
  if (!h || *h == 0) return std::nullopt;
  std::optional<double> best;
  for (std::size_t m : g.adj[src]) {
    double energy = 0.0;
    if (m == dst) {
      energy = g.cost[dst];
    } else {
      const auto hm = hop_distance(g, m, dst);
      if (!hm || *hm + 1 != *h) continue;
      energy = lex_best(g, m, dst)->energy + g.cost[m];
    }
    if (!best || energy < *best) best = energy;
  }
  return best;
}

std::optional<double> min_energy_min_hop(const OracleGraph& g, std::size_t src, std::size_t dst) {
  const auto h = hop_distance(g, src, dst);
  if (!h) return std::nullopt;
  std::optional<double> best;
  for (const auto& p : simple_paths(g, src, dst)) {
    if (p.size() - 1 != *h) continue;
    const double e = path_metric(g, p).energy;
    if (!best || e < *best) best = e;
  }
  return best;
}

bool connected(const OracleGraph& g) {
  for (std::size_t v = 1; v < g.n; ++v) {
    if (!hop_distance(g, 0, v)) return false;
  }
  return true;
}

std::int64_t airtime_us(std::uint64_t bits, std::uint64_t rate_bps) {
  return static_cast<std::int64_t>((bits * 1'000'000 + rate_bps - 1) / rate_bps);
}

}  // namespace wfd::testing
