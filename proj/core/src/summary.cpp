#include "wfd/summary.hpp"

#include <algorithm>
#include <charconv>
#include <tuple>

namespace wfd {
namespace {

std::uint64_t to_u64(std::string_view text) {
  std::uint64_t v = 0;
  std::from_chars(text.data(), text.data() + text.size(), v);
  return v;
}

std::string outcome_for_drop(std::string_view reason) {
  if (reason == "NoRoute") return "NO_ROUTE";
  if (reason == "TtlExpired") return "TTL_EXPIRED";
  return "LOST";
}

bool changes_table(const TraceRecord& r) {
  const auto action = r.field_or("action", "");
  const bool relevant = (r.event_class == EventClass::kAdvert && (action == "rx" || action == "invalidate")) ||
                        (r.event_class == EventClass::kDiscovery && action == "entry");
  return relevant && r.field_or("changed", "-") != "-";
}

}  // namespace

const FlowSummary* Summary::flow(const std::string& id) const {
  for (const auto& f : flows) {
    if (f.flow == id) return &f;
  }
  return nullptr;
}

Summary summarize(const std::vector<TraceRecord>& records) {
  Summary s;
  std::map<std::string, FlowSummary> flows;

  for (const TraceRecord& r : records) {
    ++s.records;
    s.last_event_us = std::max(s.last_event_us, r.time_us);

    if (r.event_class == EventClass::kDrop) ++s.drops_by_reason[std::string(r.field_or("reason", "unknown"))];

    if (r.event_class == EventClass::kAdvert && r.field_or("action", "") == "tx") {
      NodeSummary& n = s.nodes[r.node];
      const auto entries = to_u64(r.field_or("n", "0"));
      ++n.adverts;
      n.advertised_entries += entries;
      if (r.field_or("full", "0") == "1") {
        ++n.full_dumps;
      } else {
        ++n.incremental_adverts;
        n.incremental_entries += entries;
      }
    }
    if (changes_table(r)) {
      ++s.nodes[r.node].table_changes;
      s.convergence_us = r.time_us;
    }

    if (r.field_or("kind", "") != "data") continue;
    const auto flow_id = r.field("flow");
    if (!flow_id) continue;
    auto [it, fresh] = flows.try_emplace(std::string(*flow_id));
    FlowSummary& f = it->second;
    if (fresh) {
      f.flow = *flow_id;
      f.src = r.field_or("src", "");
      f.dst = r.field_or("dst", "");
      f.app_seq = to_u64(r.field_or("seq", "0"));
      f.traffic_class = r.field_or("class", "");
      f.sent_us = r.time_us;
      f.path.push_back(f.src);
    }
    if (f.outcome != "PENDING") continue;

    auto extend = [&f](std::string_view node) {
      if (!node.empty() && (f.path.empty() || f.path.back() != node)) f.path.emplace_back(node);
    };
    switch (r.event_class) {
      case EventClass::kForward:
        extend(r.node);
        break;
      case EventClass::kDeliver:
        extend(r.node);
        f.outcome = "DELIVERED";
        f.latency_us = r.time_us - f.sent_us;
        break;
      case EventClass::kDrop: {
        const auto reason = r.field_or("reason", "");
        if (reason == "Duplicate") break;
        // Frames lost in flight are recorded at the intended receiver; the
        // packet itself last sat at the sender.
        extend(r.field_or("from", r.node));
        f.outcome = outcome_for_drop(reason);
        f.drop_reason = reason;
        f.latency_us = r.time_us - f.sent_us;
        break;
      }
      default:
        break;
    }
  }

  for (auto& [id, f] : flows) s.flows.push_back(std::move(f));
  std::stable_sort(s.flows.begin(), s.flows.end(),
                   [](const auto& a, const auto& b) { return std::tie(a.sent_us, a.flow) < std::tie(b.sent_us, b.flow); });
  return s;
}

nlohmann::ordered_json to_json(const Summary& s) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["records"] = s.records;
  j["last_event_us"] = s.last_event_us;
  j["convergence_us"] = s.convergence_us ? ordered_json(*s.convergence_us) : ordered_json(nullptr);

  ordered_json flows = ordered_json::array();
  for (const auto& f : s.flows) {
    ordered_json jf;
    jf["flow"] = f.flow;
    jf["src"] = f.src;
    jf["dst"] = f.dst;
    jf["app_seq"] = f.app_seq;
    jf["class"] = f.traffic_class;
    jf["sent_us"] = f.sent_us;
    jf["outcome"] = f.outcome;
    if (!f.drop_reason.empty()) jf["drop_reason"] = f.drop_reason;
    jf["path"] = f.path;
    jf["path_length"] = f.path.size();
    jf["latency_us"] = f.latency_us ? ordered_json(*f.latency_us) : ordered_json(nullptr);
    flows.push_back(std::move(jf));
  }
  j["flows"] = std::move(flows);

  ordered_json nodes = ordered_json::object();
  for (const auto& [name, n] : s.nodes) {
    nodes[name] = {{"adverts", n.adverts},
                   {"full_dumps", n.full_dumps},
                   {"incremental_adverts", n.incremental_adverts},
                   {"advertised_entries", n.advertised_entries},
                   {"incremental_entries", n.incremental_entries},
                   {"table_changes", n.table_changes}};
  }
  j["nodes"] = std::move(nodes);

  ordered_json drops = ordered_json::object();
  for (const auto& [reason, count] : s.drops_by_reason) drops[reason] = count;
  j["drops_by_reason"] = std::move(drops);
  return j;
}

std::string format_summary(const Summary& summary) { return to_json(summary).dump(2) + "\n"; }

}  // namespace wfd
