#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wfd/linklayer.hpp"
#include "wfd/network.hpp"
#include "wfd/routing.hpp"
#include "wfd/types.hpp"

namespace wfd {

// A connect, join or bridge directive. All three go through
// ConnectionManager::connect; the kind only documents the expected outcome.
struct GroupDirective {
  enum class Kind : std::uint8_t { kConnect, kJoin, kBridge };
  Kind kind = Kind::kConnect;
  SimTime at{};
  std::string local;
  std::string peer;
};

struct MoveDirective {
  SimTime at{};
  std::string node;
  Position to;
};

struct TrafficDirective {
  SimTime at{};
  std::string src;
  std::string dst;
  std::uint64_t payload_bits = 0;
  TrafficClass traffic_class = TrafficClass::kRealTime;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  Duration duration = std::chrono::seconds(60);
  SimTime advert_start{};
  NetworkConfig network;
  std::vector<NodeSpec> nodes;
  std::vector<GroupDirective> groups;
  std::vector<MoveDirective> mobility;
  std::vector<TrafficDirective> traffic;
};

// Carries "source:line:column: message" when the location is known.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioLoad {
  Scenario scenario;
  // Suspicious but legal content. Strict loading turns these into errors.
  std::vector<std::string> warnings;
};

struct LoadOptions {
  bool strict = false;
};

ScenarioLoad parse_scenario(std::string_view text, const std::string& source_name, const LoadOptions& options = {});
ScenarioLoad load_scenario(const std::filesystem::path& path, const LoadOptions& options = {});

}  // namespace wfd
