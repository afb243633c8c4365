#include "wfd/runner.hpp"

#include <algorithm>

namespace wfd {

std::unique_ptr<Network> build_network(const Scenario& scenario, std::optional<std::uint64_t> seed) {
  NetworkConfig config = scenario.network;
  config.seed = seed.value_or(scenario.seed);
  auto net = std::make_unique<Network>(config, scenario.nodes);

  for (const auto& g : scenario.groups) net->schedule_connect(g.at, net->id(g.local), net->id(g.peer));
  for (const auto& m : scenario.mobility) net->schedule_move(m.at, net->id(m.node), m.to);
  net->start_adverts(scenario.advert_start);
  for (const auto& t : scenario.traffic) {
    net->schedule_send(t.at, net->id(t.src), net->id(t.dst), t.payload_bits, t.traffic_class);
  }
  return net;
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  RunResult result;
  result.network = build_network(scenario, options.seed);
  Network& net = *result.network;
  if (options.trace_out != nullptr) net.trace().set_output(options.trace_out);

  Duration limit = scenario.duration;
  if (options.until) limit = std::min(limit, *options.until);
  result.end_time = SimTime{limit};
  net.run_until(result.end_time);
  net.engine().finish();
  net.trace().set_output(nullptr);

  result.events = net.engine().processed();
  result.summary = summarize(net.trace().records());
  return result;
}

}  // namespace wfd
