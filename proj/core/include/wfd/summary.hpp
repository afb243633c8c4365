#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wfd/trace.hpp"

namespace wfd {

struct FlowSummary {
  std::string flow;  // "<src>#<app_seq>"
  std::string src;
  std::string dst;
  std::uint64_t app_seq = 0;
  std::string traffic_class;
  std::int64_t sent_us = 0;
  // DELIVERED, NO_ROUTE, TTL_EXPIRED, LOST or PENDING.
  std::string outcome = "PENDING";
  std::string drop_reason;
  std::vector<std::string> path;
  std::optional<std::int64_t> latency_us;
};

struct NodeSummary {
  std::uint64_t adverts = 0;
  std::uint64_t full_dumps = 0;
  std::uint64_t incremental_adverts = 0;
  std::uint64_t advertised_entries = 0;
  std::uint64_t incremental_entries = 0;
  std::uint64_t table_changes = 0;
};

// Everything here is derived from trace records alone.
struct Summary {
  std::uint64_t records = 0;
  std::int64_t last_event_us = 0;
  std::vector<FlowSummary> flows;  // ordered by (sent_us, flow)
  std::map<std::string, NodeSummary> nodes;
  // Time of the last routing-table change, if any.
  std::optional<std::int64_t> convergence_us;
  std::map<std::string, std::uint64_t> drops_by_reason;

  const FlowSummary* flow(const std::string& id) const;
};

Summary summarize(const std::vector<TraceRecord>& records);

nlohmann::ordered_json to_json(const Summary& summary);
// Pretty-printed JSON with a fixed key order, newline terminated.
std::string format_summary(const Summary& summary);

}  // namespace wfd
