#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>

#include "wfd/network.hpp"
#include "wfd/scenario.hpp"
#include "wfd/summary.hpp"

namespace wfd {

// Builds the network for a scenario and schedules every directive in it:
// group formation, mobility, adverts from advert_start, and traffic.
// Nothing has run yet when this returns.
std::unique_ptr<Network> build_network(const Scenario& scenario, std::optional<std::uint64_t> seed = std::nullopt);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  // Stops early; never extends past the scenario duration.
  std::optional<Duration> until;
  // Trace lines are written here as they are produced.
  std::ostream* trace_out = nullptr;
};

struct RunResult {
  Summary summary;
  SimTime end_time{};
  std::uint64_t events = 0;
  std::unique_ptr<Network> network;
};

RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

}  // namespace wfd
