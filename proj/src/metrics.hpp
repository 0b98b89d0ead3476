#pragma once

#include <string>
#include <vector>

#include "simulator.hpp"

namespace ridepool {

struct Metrics {
  long long issued = 0;
  long long completed = 0;
  long long cancelled = 0;
  long long in_flight = 0;
  double answer_rate = 0.0;
  bool answer_rate_defined = false;
  double avg_wait_s = 0.0;
  long long shared_orders = 0;
  double shared_distance_km = 0.0;
  double empty_distance_km = 0.0;
  double solo_distance_km = 0.0;
  double total_distance_km = 0.0;
  long long plans_total = 0;
  double certified_fraction = 0.0;
  double mean_detour_ratio = 0.0;
};

bool metrics_equal(const Metrics& a, const Metrics& b);

// Aggregates taken straight from the live simulation state.
Metrics live_metrics(const Simulation& sim);

// Independent second pass over the event log; rider counts, waits and
// per-vehicle distances are all rebuilt from the rows alone.
Metrics compute_metrics(const std::vector<EventRow>& rows);
Metrics compute_metrics_file(const std::string& event_log_path);

std::string metrics_kv(const Metrics& m, const SimulationConfig& config);
std::string metrics_table(const Metrics& m);
void write_text_file(const std::string& content, const std::string& path);

}  // namespace ridepool
