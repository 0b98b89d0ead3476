#pragma once

#include <string>
#include <utility>
#include <vector>

#include "metrics.hpp"
#include "simulator.hpp"

namespace ridepool {

struct Scenario {
  SimulationConfig config;
  std::string network_path;
  std::string demand_path;
};

// Key-value scenario file; '#' starts a comment. Relative network/demand
// paths resolve against the scenario file directory.
Scenario load_scenario(const std::string& path);
void apply_override(Scenario& scenario, const std::string& key, const std::string& value);
std::string scenario_template();

struct RunResult {
  Metrics metrics;
  std::string events_path;
  std::string metrics_kv_path;
  std::string metrics_table_path;
};

// Runs the scenario and writes events.csv, metrics.kv and metrics.txt under
// out_dir. The replayed event log must agree with the live counters.
RunResult run_scenario(const Scenario& scenario, const std::string& out_dir);

struct SweepVariant {
  std::string name;
  std::vector<std::pair<std::string, std::string>> overrides;
};

struct SweepCell {
  bool ok = false;
  std::string error;
  Metrics metrics;
};

struct SweepResult {
  std::vector<std::string> variant_names;
  std::vector<uint64_t> seeds;
  std::vector<std::vector<SweepCell>> cells;  // [variant][seed]

  double mean(const std::string& variant, const std::string& metric) const;
  double stddev(const std::string& variant, const std::string& metric) const;
};

SweepResult sweep(const Scenario& base, const std::vector<SweepVariant>& variants,
                  const std::vector<uint64_t>& seeds, const std::string& out_dir);

std::string sweep_csv(const SweepResult& result);
std::string sweep_table(const SweepResult& result);

}  // namespace ridepool
