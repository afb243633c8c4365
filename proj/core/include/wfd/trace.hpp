#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wfd/types.hpp"

namespace wfd {

enum class EventClass : std::uint8_t {
  kDiscovery,
  kNegotiation,
  kGroup,
  kAdvert,
  kForward,
  kDeliver,
  kDrop,
  kConnect,
};

std::string_view to_string(EventClass c);
std::optional<EventClass> parse_event_class(std::string_view text);

using TraceFields = std::vector<std::pair<std::string, std::string>>;

// One trace line: `time_us node EVENT_CLASS key=value ...`. Keys and values
// never contain whitespace or '='; see docs/trace-format.md.
struct TraceRecord {
  std::int64_t time_us = 0;
  std::string node;
  EventClass event_class = EventClass::kDiscovery;
  TraceFields fields;

  std::optional<std::string_view> field(std::string_view key) const;
  std::string_view field_or(std::string_view key, std::string_view fallback) const;

  bool operator==(const TraceRecord&) const = default;
};

std::string format_record(const TraceRecord& record);

class TraceParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

TraceRecord parse_record(std::string_view line);
std::vector<TraceRecord> read_trace(std::istream& in);

// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

// Builder for the key=value list of a record.
class Fields {
 public:
  Fields& add(std::string key, std::string value);
  Fields& add(std::string key, std::string_view value) { return add(std::move(key), std::string(value)); }
  Fields& add(std::string key, const char* value) { return add(std::move(key), std::string(value)); }
  Fields& add(std::string key, std::int64_t value) { return add(std::move(key), std::to_string(value)); }
  Fields& add(std::string key, std::uint64_t value) { return add(std::move(key), std::to_string(value)); }
  Fields& add(std::string key, int value) { return add(std::move(key), std::to_string(value)); }
  Fields& add(std::string key, unsigned value) { return add(std::move(key), std::to_string(value)); }
  Fields& add(std::string key, bool value) { return add(std::move(key), std::string(value ? "1" : "0")); }
  Fields& add(std::string key, double value) { return add(std::move(key), format_double(value)); }
  Fields& add(std::string key, Duration value) { return add(std::move(key), std::to_string(value.count())); }

  TraceFields take() && { return std::move(fields_); }

 private:
  TraceFields fields_;
};

// Trace sink owned by one simulation. Records are kept in memory and, when an
// output stream is attached, written through as they are produced.
class Trace {
 public:
  void register_node(NodeId id, std::string name);
  const std::string& name(NodeId id) const;
  std::optional<NodeId> lookup(std::string_view name) const;

  void record(SimTime time, NodeId node, EventClass event_class, Fields fields);

  void set_output(std::ostream* out) { out_ = out; }
  void set_keep_records(bool keep) { keep_ = keep; }

  const std::vector<TraceRecord>& records() const { return records_; }
  std::size_t size() const { return count_; }

  // Whole trace in its on-disk form.
  std::string str() const;

 private:
  std::vector<std::string> names_;
  std::vector<TraceRecord> records_;
  std::ostream* out_ = nullptr;
  bool keep_ = true;
  std::size_t count_ = 0;
};

}  // namespace wfd
