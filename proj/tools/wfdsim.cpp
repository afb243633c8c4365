// wfdsim: run, validate and replay Wi-Fi Direct MANET scenarios.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wfd/runner.hpp"
#include "wfd/scenario.hpp"
#include "wfd/summary.hpp"
#include "wfd/trace.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;

void print_warnings(const wfd::ScenarioLoad& load) {
  for (const auto& w : load.warnings) std::cerr << "warning: " << w << "\n";
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

struct RunArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<double> until_s;
  std::string trace_path;
  std::string summary_path;
  bool strict = false;
};

int cmd_run(const RunArgs& args) {
  const auto load = wfd::load_scenario(args.scenario, {args.strict});
  print_warnings(load);

  wfd::RunOptions options;
  options.seed = args.seed;
  if (args.until_s) {
    if (*args.until_s < 0) throw wfd::ScenarioError("--until must be >= 0");
    options.until = wfd::Duration{std::llround(*args.until_s * 1e6)};
  }
  std::ofstream trace_file;
  if (!args.trace_path.empty()) {
    trace_file.open(args.trace_path, std::ios::binary);
    if (!trace_file) {
      std::cerr << "error: cannot write " << args.trace_path << "\n";
      return kExitRuntime;
    }
    options.trace_out = &trace_file;
  }

  const auto result = wfd::run_scenario(load.scenario, options);
  trace_file.close();
  if (!args.trace_path.empty() && trace_file.fail()) {
    std::cerr << "error: failed writing " << args.trace_path << "\n";
    return kExitRuntime;
  }

  const std::string summary = wfd::format_summary(result.summary);
  if (args.summary_path.empty()) {
    std::cout << summary;
  } else if (!write_file(args.summary_path, summary)) {
    std::cerr << "error: cannot write " << args.summary_path << "\n";
    return kExitRuntime;
  }
  return 0;
}

int cmd_validate(const std::string& path, bool strict) {
  const auto load = wfd::load_scenario(path, {strict});
  print_warnings(load);
  const auto& s = load.scenario;
  std::cout << "ok: " << s.name << " (" << s.nodes.size() << " nodes, " << s.groups.size() << " group directives, "
            << s.mobility.size() << " moves, " << s.traffic.size() << " flows)\n";
  return 0;
}

int cmd_replay(const std::string& path, const std::string& summary_path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    return kExitRuntime;
  }
  const auto records = wfd::read_trace(in);
  const std::string summary = wfd::format_summary(wfd::summarize(records));
  if (summary_path.empty()) {
    std::cout << summary;
  } else if (!write_file(summary_path, summary)) {
    std::cerr << "error: cannot write " << summary_path << "\n";
    return kExitRuntime;
  }
  return 0;
}

int cmd_batch(const std::vector<std::string>& scenarios, std::optional<std::uint64_t> seed, unsigned jobs,
              const std::string& out_dir, bool strict) {
  std::filesystem::create_directories(out_dir);
  std::atomic<std::size_t> next{0};
  std::atomic<int> status{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      const std::filesystem::path path(scenarios[i]);
      const auto stem = (std::filesystem::path(out_dir) / path.stem()).string();
      try {
        const auto load = wfd::load_scenario(path, {strict});
        std::ofstream trace(stem + ".trace", std::ios::binary);
        wfd::RunOptions options;
        options.seed = seed;
        options.trace_out = &trace;
        const auto result = wfd::run_scenario(load.scenario, options);
        write_file(stem + ".summary.json", wfd::format_summary(result.summary));
        std::lock_guard lock(log_mutex);
        std::cout << path.string() << ": ok (" << result.events << " events)\n";
      } catch (const std::exception& e) {
        std::lock_guard lock(log_mutex);
        std::cerr << "error: " << e.what() << "\n";
        status = kExitInvalid;
      }
    }
  };

  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(scenarios.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wi-Fi Direct multi-hop network simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a scenario and print its summary");
  run->add_option("scenario", run_args.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", run_args.seed, "Override the scenario seed");
  run->add_option("--until", run_args.until_s, "Stop after this many simulated seconds");
  run->add_option("--trace", run_args.trace_path, "Write the event trace to this file");
  run->add_option("--summary", run_args.summary_path, "Write the summary here instead of stdout");
  run->add_flag("--strict", run_args.strict, "Treat scenario warnings as errors");

  std::string validate_path;
  bool validate_strict = false;
  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("scenario", validate_path, "Scenario file")->required()->check(CLI::ExistingFile);
  validate->add_flag("--strict", validate_strict, "Treat scenario warnings as errors");

  std::string replay_path;
  std::string replay_summary;
  auto* replay = app.add_subcommand("replay", "Recompute the summary from a trace file");
  replay->add_option("trace", replay_path, "Trace file")->required()->check(CLI::ExistingFile);
  replay->add_option("--summary", replay_summary, "Write the summary here instead of stdout");

  std::vector<std::string> batch_paths;
  std::optional<std::uint64_t> batch_seed;
  unsigned batch_jobs = 1;
  std::string batch_out;
  bool batch_strict = false;
  auto* batch = app.add_subcommand("batch", "Run several scenarios, writing traces and summaries to a directory");
  batch->add_option("scenarios", batch_paths, "Scenario files")->required()->check(CLI::ExistingFile);
  batch->add_option("--seed", batch_seed, "Override every scenario's seed");
  batch->add_option("--jobs,-j", batch_jobs, "Scenarios to run concurrently")->check(CLI::Range(1u, 256u));
  batch->add_option("--out", batch_out, "Output directory")->required();
  batch->add_flag("--strict", batch_strict, "Treat scenario warnings as errors");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_args);
    if (*validate) return cmd_validate(validate_path, validate_strict);
    if (*replay) return cmd_replay(replay_path, replay_summary);
    if (*batch) return cmd_batch(batch_paths, batch_seed, batch_jobs, batch_out, batch_strict);
  } catch (const wfd::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const wfd::TraceParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
