#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "oracle.hpp"
#include "wfd/network.hpp"
#include "wfd/runner.hpp"
#include "wfd/scenario.hpp"
#include "wfd/trace.hpp"

namespace wfd::testing {

std::filesystem::path scenario_path(std::string_view name);
Scenario load_bundled(std::string_view name);

// node -> destination -> hop count, valid entries only.
using TableSnapshot = std::map<std::string, std::map<std::string, std::uint32_t>>;
TableSnapshot snapshot_tables(Network& net);

// A random connected network of at most max_nodes devices: a few group
// owners, each with at least one client, and bridges between the owners.
// Every device is in radio range of every other; only group relations make
// links. Data rates, MAC latencies and energy costs vary per node.
Scenario random_graph_scenario(std::uint64_t seed, std::size_t max_nodes = 8);

// Link graph as currently formed by the link layer, with link latencies
// computed from the node radio parameters.
OracleGraph oracle_graph(Network& net, const std::vector<NodeSpec>& specs);

struct OracleReport {
  std::size_t pairs = 0;
  std::size_t mismatches = 0;
  std::string first_mismatch;
};

// Compares every node's REAL_TIME and BULK selections with the oracles.
OracleReport compare_with_oracle(Network& net, const OracleGraph& g);

// True when no data packet is handled twice by the same node.
bool loop_free(const std::vector<TraceRecord>& records, std::string* detail = nullptr);

}  // namespace wfd::testing
