#include "wfd/trace.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace wfd {
namespace {

constexpr std::array<std::string_view, 8> kClassNames = {
    "DISCOVERY", "NEGOTIATION", "GROUP", "ADVERT", "FORWARD", "DELIVER", "DROP", "CONNECT",
};

bool is_token(std::string_view s, bool allow_equals) {
  if (s.empty()) return false;
  return std::none_of(s.begin(), s.end(), [&](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || (!allow_equals && c == '=');
  });
}

}  // namespace

std::string_view to_string(EventClass c) { return kClassNames[static_cast<std::size_t>(c)]; }

std::optional<EventClass> parse_event_class(std::string_view text) {
  for (std::size_t i = 0; i < kClassNames.size(); ++i) {
    if (kClassNames[i] == text) return static_cast<EventClass>(i);
  }
  return std::nullopt;
}

std::optional<std::string_view> TraceRecord::field(std::string_view key) const {
  for (const auto& [k, v] : fields) {
    if (k == key) return std::string_view(v);
  }
  return std::nullopt;
}

std::string_view TraceRecord::field_or(std::string_view key, std::string_view fallback) const {
  return field(key).value_or(fallback);
}

std::string format_record(const TraceRecord& record) {
  std::string line = std::to_string(record.time_us);
  line += ' ';
  line += record.node;
  line += ' ';
  line += to_string(record.event_class);
  for (const auto& [k, v] : record.fields) {
    line += ' ';
    line += k;
    line += '=';
    line += v;
  }
  return line;
}

TraceRecord parse_record(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const std::size_t next = line.find(' ', pos);
    const std::size_t end = next == std::string_view::npos ? line.size() : next;
    if (end == pos) throw TraceParseError("empty token in trace line: " + std::string(line));
    tokens.push_back(line.substr(pos, end - pos));
    pos = end == line.size() ? end : end + 1;
  }
  if (tokens.size() < 3) throw TraceParseError("trace line needs time, node and class: " + std::string(line));

  TraceRecord record;
  const auto [ptr, ec] = std::from_chars(tokens[0].data(), tokens[0].data() + tokens[0].size(), record.time_us);
  if (ec != std::errc{} || ptr != tokens[0].data() + tokens[0].size() || record.time_us < 0) {
    throw TraceParseError("bad time field: " + std::string(tokens[0]));
  }
  record.node = std::string(tokens[1]);
  const auto cls = parse_event_class(tokens[2]);
  if (!cls) throw TraceParseError("unknown event class: " + std::string(tokens[2]));
  record.event_class = *cls;
  for (std::size_t i = 3; i < tokens.size(); ++i) {
    const std::size_t eq = tokens[i].find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw TraceParseError("bad key=value field: " + std::string(tokens[i]));
    }
    record.fields.emplace_back(std::string(tokens[i].substr(0, eq)), std::string(tokens[i].substr(eq + 1)));
  }
  return record;
}

std::vector<TraceRecord> read_trace(std::istream& in) {
  std::vector<TraceRecord> records;
  std::string line;
  std::int64_t last = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(parse_record(line));
    if (records.back().time_us < last) throw TraceParseError("trace is not time-ordered at: " + line);
    last = records.back().time_us;
  }
  return records;
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::logic_error("format_double failed");
  return std::string(buf.data(), ptr);
}

Fields& Fields::add(std::string key, std::string value) {
  if (!is_token(key, false)) throw std::logic_error("trace key is not a token: '" + key + "'");
  if (!is_token(value, true)) throw std::logic_error("trace value is not a token: '" + value + "'");
  fields_.emplace_back(std::move(key), std::move(value));
  return *this;
}

void Trace::register_node(NodeId id, std::string name) {
  if (!is_token(name, false)) throw std::invalid_argument("node name is not a token: '" + name + "'");
  if (names_.size() <= id.value) names_.resize(id.value + 1);
  names_[id.value] = std::move(name);
}

const std::string& Trace::name(NodeId id) const {
  static const std::string kUnknown = "?";
  if (id.value < names_.size() && !names_[id.value].empty()) return names_[id.value];
  return kUnknown;
}

std::optional<NodeId> Trace::lookup(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return NodeId{static_cast<std::uint32_t>(i)};
  }
  return std::nullopt;
}

void Trace::record(SimTime time, NodeId node, EventClass event_class, Fields fields) {
  TraceRecord rec{to_us(time), name(node), event_class, std::move(fields).take()};
  ++count_;
  if (out_ != nullptr) *out_ << format_record(rec) << '\n';
  if (keep_) records_.push_back(std::move(rec));
}

std::string Trace::str() const {
  std::ostringstream out;
  for (const auto& r : records_) out << format_record(r) << '\n';
  return out.str();
}

}  // namespace wfd
