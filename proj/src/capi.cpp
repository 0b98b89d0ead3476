#include "ridepool.h"

#include <cstring>
#include <memory>
#include <string>

#include "demand.hpp"
#include "metrics.hpp"
#include "network.hpp"
#include "planner.hpp"
#include "scenario.hpp"
#include "simulator.hpp"
#include "util.hpp"

namespace {

thread_local std::string g_last_error;

rp_status status_of(ridepool::Errc code) {
  using ridepool::Errc;
  switch (code) {
    case Errc::io_error: return RP_ERR_IO;
    case Errc::parse_error: return RP_ERR_PARSE;
    case Errc::invalid_argument: return RP_ERR_INVALID_ARGUMENT;
    case Errc::malformed_record: return RP_ERR_MALFORMED_RECORD;
    case Errc::duplicate_arc: return RP_ERR_DUPLICATE_ARC;
    case Errc::self_loop: return RP_ERR_SELF_LOOP;
    case Errc::nonpositive_length: return RP_ERR_NONPOSITIVE_LENGTH;
    case Errc::node_gap: return RP_ERR_NODE_GAP;
    case Errc::nonpositive_speed: return RP_ERR_NONPOSITIVE_SPEED;
    case Errc::unreachable: return RP_ERR_UNREACHABLE;
    case Errc::bin_not_covered: return RP_ERR_BIN_NOT_COVERED;
    case Errc::missing_arc_prize: return RP_ERR_MISSING_ARC_PRIZE;
    case Errc::instance_too_large: return RP_ERR_INSTANCE_TOO_LARGE;
    case Errc::internal: return RP_ERR_INTERNAL;
  }
  return RP_ERR_INTERNAL;
}

template <typename Fn>
rp_status guarded(Fn&& fn) {
  try {
    fn();
    return RP_OK;
  } catch (const ridepool::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RP_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RP_ERR_INTERNAL;
  }
}

rp_status copy_out(const std::string& text, char* buffer, size_t cap, size_t* out_len) {
  if (out_len) *out_len = text.size() + 1;
  if (!buffer) return RP_OK;
  if (cap < text.size() + 1) {
    g_last_error = "buffer too small";
    return RP_ERR_INVALID_ARGUMENT;
  }
  std::memcpy(buffer, text.c_str(), text.size() + 1);
  return RP_OK;
}

}  // namespace

struct rp_network {
  ridepool::RoadNetwork net;
};
struct rp_distances {
  ridepool::DistanceMatrix dm;
};
struct rp_demand {
  ridepool::DemandTable table;
};
struct rp_instance {
  ridepool::PlanInstance inst;
};
struct rp_plan {
  ridepool::PlannedPath path;
};
struct rp_scenario {
  ridepool::Scenario scenario;
};
struct rp_metrics {
  ridepool::Metrics metrics;
  ridepool::SimulationConfig config;
};
struct rp_sim {
  std::unique_ptr<ridepool::RoadNetwork> net;
  std::unique_ptr<ridepool::DistanceMatrix> dm;
  std::unique_ptr<ridepool::DemandTable> demand;
  std::unique_ptr<ridepool::Simulation> sim;
};
struct rp_sweep {
  ridepool::Scenario base;
  std::vector<ridepool::SweepVariant> variants;
  std::vector<uint64_t> seeds;
  ridepool::SweepResult result;
  bool ran = false;
};

extern "C" {

const char* rp_version(void) { return "1.0.0"; }

const char* rp_last_error(void) { return g_last_error.c_str(); }

rp_status rp_network_load(const char* path, rp_network** out) {
  return guarded([&] { *out = new rp_network{ridepool::load_network(path)}; });
}

rp_status rp_network_generate_grid(int rows, int cols, double edge_length_m, rp_network** out) {
  return guarded(
      [&] { *out = new rp_network{ridepool::RoadNetwork::grid(rows, cols, edge_length_m)}; });
}

rp_status rp_network_save(const rp_network* net, const char* path) {
  return guarded([&] { ridepool::save_network(net->net, path); });
}

int rp_network_node_count(const rp_network* net) { return net->net.node_count(); }

int rp_network_arc_count(const rp_network* net) { return net->net.arc_count(); }

void rp_network_free(rp_network* net) { delete net; }

rp_status rp_distances_compute(const rp_network* net, rp_distances** out) {
  return guarded(
      [&] { *out = new rp_distances{ridepool::DistanceMatrix::floyd_warshall(net->net)}; });
}

rp_status rp_distances_get(const rp_distances* dm, int from, int to, double* out_meters) {
  return guarded([&] {
    if (from < 0 || from >= dm->dm.size() || to < 0 || to >= dm->dm.size())
      ridepool::fail(ridepool::Errc::invalid_argument, "node id out of range");
    *out_meters = dm->dm.dist(from, to);
  });
}

rp_status rp_distances_path(const rp_distances* dm, int from, int to, int* nodes, size_t cap,
                            size_t* out_len) {
  return guarded([&] {
    const std::vector<int> path = dm->dm.reconstruct_path(from, to);
    if (path.empty())
      ridepool::fail(ridepool::Errc::unreachable, "no path between the given nodes");
    if (out_len) *out_len = path.size();
    if (nodes) {
      if (cap < path.size())
        ridepool::fail(ridepool::Errc::invalid_argument, "node buffer too small");
      std::memcpy(nodes, path.data(), path.size() * sizeof(int));
    }
  });
}

void rp_distances_free(rp_distances* dm) { delete dm; }

rp_status rp_demand_load(const char* path, rp_demand** out) {
  return guarded([&] { *out = new rp_demand{ridepool::load_demand(path)}; });
}

rp_status rp_demand_save(const rp_demand* demand, const char* path) {
  return guarded([&] { ridepool::save_demand(demand->table, path); });
}

rp_status rp_demand_generate(const char* pattern, int rows, int cols, double total_rate_per_hour,
                             const char* bins_spec, double bg_fraction, int pairs, uint64_t seed,
                             rp_demand** out) {
  return guarded([&] {
    const auto bins = ridepool::parse_bin_spec(bins_spec);
    const std::string kind = pattern ? pattern : "";
    if (kind == "corridor") {
      *out = new rp_demand{ridepool::generate_demand_corridor(rows, cols, total_rate_per_hour,
                                                              bins, bg_fraction, pairs, seed)};
    } else if (kind == "uniform") {
      *out = new rp_demand{
          ridepool::generate_demand_uniform(rows * cols, total_rate_per_hour, bins, pairs, seed)};
    } else {
      ridepool::fail(ridepool::Errc::invalid_argument,
                     "unknown demand pattern '" + kind + "' (expected corridor|uniform)");
    }
  });
}

void rp_demand_free(rp_demand* demand) { delete demand; }

rp_status rp_instance_load(const char* path, rp_instance** out) {
  return guarded([&] { *out = new rp_instance{ridepool::load_instance(path)}; });
}

rp_status rp_instance_save(const rp_instance* inst, const char* path) {
  return guarded([&] { ridepool::save_instance(inst->inst, path); });
}

int rp_instance_arc_count(const rp_instance* inst) {
  return static_cast<int>(inst->inst.arcs.size());
}

double rp_instance_budget_m(const rp_instance* inst) { return inst->inst.budget_m; }

void rp_instance_free(rp_instance* inst) { delete inst; }

rp_status rp_plan_solve(const rp_instance* inst, long long max_expansions, double time_limit_s,
                        rp_plan** out) {
  return guarded([&] {
    ridepool::SolverConfig config;
    if (max_expansions > 0) config.max_expansions = max_expansions;
    config.time_limit_s = time_limit_s;
    *out = new rp_plan{ridepool::plan_route(inst->inst, config)};
  });
}

double rp_plan_length_m(const rp_plan* plan) { return plan->path.length_m; }

double rp_plan_linear_objective(const rp_plan* plan) { return plan->path.linear_objective; }

double rp_plan_exact_objective(const rp_plan* plan) { return plan->path.exact_objective; }

int rp_plan_certified(const rp_plan* plan) { return plan->path.certified ? 1 : 0; }

size_t rp_plan_node_count(const rp_plan* plan) { return plan->path.nodes.size(); }

rp_status rp_plan_nodes(const rp_plan* plan, int* nodes, size_t cap) {
  return guarded([&] {
    if (cap < plan->path.nodes.size())
      ridepool::fail(ridepool::Errc::invalid_argument, "node buffer too small");
    std::memcpy(nodes, plan->path.nodes.data(), plan->path.nodes.size() * sizeof(int));
  });
}

void rp_plan_free(rp_plan* plan) { delete plan; }

rp_status rp_scenario_load(const char* path, rp_scenario** out) {
  return guarded([&] { *out = new rp_scenario{ridepool::load_scenario(path)}; });
}

rp_status rp_scenario_set(rp_scenario* scenario, const char* key, const char* value) {
  return guarded([&] { ridepool::apply_override(scenario->scenario, key, value); });
}

rp_status rp_scenario_template(char* buffer, size_t cap, size_t* out_len) {
  return copy_out(ridepool::scenario_template(), buffer, cap, out_len);
}

void rp_scenario_free(rp_scenario* scenario) { delete scenario; }

rp_status rp_run_scenario(const rp_scenario* scenario, const char* out_dir, rp_metrics** out) {
  return guarded([&] {
    const ridepool::RunResult result = ridepool::run_scenario(scenario->scenario, out_dir);
    if (out) *out = new rp_metrics{result.metrics, scenario->scenario.config};
  });
}

rp_status rp_metrics_get(const rp_metrics* metrics, const char* key, double* out_value) {
  return guarded([&] {
    const ridepool::Metrics& m = metrics->metrics;
    const std::string k = key ? key : "";
    if (k == "issued") *out_value = static_cast<double>(m.issued);
    else if (k == "completed") *out_value = static_cast<double>(m.completed);
    else if (k == "cancelled") *out_value = static_cast<double>(m.cancelled);
    else if (k == "in_flight") *out_value = static_cast<double>(m.in_flight);
    else if (k == "answer_rate") *out_value = m.answer_rate;
    else if (k == "avg_wait_s") *out_value = m.avg_wait_s;
    else if (k == "shared_orders") *out_value = static_cast<double>(m.shared_orders);
    else if (k == "shared_distance_km") *out_value = m.shared_distance_km;
    else if (k == "empty_distance_km") *out_value = m.empty_distance_km;
    else if (k == "solo_distance_km") *out_value = m.solo_distance_km;
    else if (k == "total_distance_km") *out_value = m.total_distance_km;
    else if (k == "plans_total") *out_value = static_cast<double>(m.plans_total);
    else if (k == "certified_fraction") *out_value = m.certified_fraction;
    else if (k == "mean_detour_ratio") *out_value = m.mean_detour_ratio;
    else ridepool::fail(ridepool::Errc::invalid_argument, "unknown metric key '" + k + "'");
  });
}

rp_status rp_metrics_kv(const rp_metrics* metrics, char* buffer, size_t cap, size_t* out_len) {
  return copy_out(ridepool::metrics_kv(metrics->metrics, metrics->config), buffer, cap, out_len);
}

void rp_metrics_free(rp_metrics* metrics) { delete metrics; }

rp_status rp_sim_create(const rp_scenario* scenario, rp_sim** out) {
  return guarded([&] {
    auto sim = std::make_unique<rp_sim>();
    sim->net = std::make_unique<ridepool::RoadNetwork>(
        ridepool::load_network(scenario->scenario.network_path));
    sim->demand = std::make_unique<ridepool::DemandTable>(
        ridepool::load_demand(scenario->scenario.demand_path));
    sim->dm = std::make_unique<ridepool::DistanceMatrix>(
        ridepool::DistanceMatrix::floyd_warshall(*sim->net));
    sim->sim = std::make_unique<ridepool::Simulation>(*sim->net, *sim->dm, *sim->demand,
                                                      scenario->scenario.config);
    *out = sim.release();
  });
}

rp_status rp_sim_step(rp_sim* sim, long long ticks) {
  return guarded([&] {
    for (long long k = 0; k < ticks && !sim->sim->finished(); ++k) sim->sim->step();
  });
}

double rp_sim_time_s(const rp_sim* sim) { return sim->sim->time_s(); }

rp_status rp_sim_export_field(const rp_sim* sim, int origin, int dest, const char* path) {
  return guarded([&] {
    const ridepool::TripQuery query{origin, dest, sim->sim->time_s()};
    ridepool::export_field_csv(sim->sim->probability_field(query), path);
  });
}

rp_status rp_sim_dump_plan_instance(const rp_sim* sim, int origin, int dest, const char* path) {
  return guarded([&] {
    const ridepool::TripQuery query{origin, dest, sim->sim->time_s()};
    const ridepool::EdgeProbabilityField field = sim->sim->probability_field(query);
    ridepool::save_instance(ridepool::make_plan_instance(field, sim->sim->network()), path);
  });
}

void rp_sim_free(rp_sim* sim) { delete sim; }

rp_status rp_sweep_new(const rp_scenario* base, rp_sweep** out) {
  return guarded([&] { *out = new rp_sweep{base->scenario, {}, {}, {}, false}; });
}

rp_status rp_sweep_add_variant(rp_sweep* sweep, const char* name, const char* overrides) {
  return guarded([&] {
    ridepool::SweepVariant variant;
    variant.name = name ? name : "";
    if (variant.name.empty())
      ridepool::fail(ridepool::Errc::invalid_argument, "variant name must be non-empty");
    const std::string spec = overrides ? overrides : "";
    if (!spec.empty()) {
      for (const auto part : ridepool::split(spec, ',')) {
        const auto kv = ridepool::split(ridepool::trim(part), '=');
        if (kv.size() != 2)
          ridepool::fail(ridepool::Errc::parse_error,
                         "override must be key=value: '" + std::string(part) + "'");
        variant.overrides.emplace_back(std::string(ridepool::trim(kv[0])),
                                       std::string(ridepool::trim(kv[1])));
      }
    }
    sweep->variants.push_back(std::move(variant));
  });
}

rp_status rp_sweep_add_seed(rp_sweep* sweep, uint64_t seed) {
  return guarded([&] { sweep->seeds.push_back(seed); });
}

rp_status rp_sweep_run(rp_sweep* sweep, const char* out_dir) {
  return guarded([&] {
    sweep->result = ridepool::sweep(sweep->base, sweep->variants, sweep->seeds, out_dir);
    sweep->ran = true;
  });
}

rp_status rp_sweep_cell(const rp_sweep* sweep, const char* variant, const char* metric,
                        double* out_mean, double* out_std) {
  return guarded([&] {
    if (!sweep->ran)
      ridepool::fail(ridepool::Errc::invalid_argument, "sweep has not been run yet");
    if (out_mean) *out_mean = sweep->result.mean(variant, metric);
    if (out_std) *out_std = sweep->result.stddev(variant, metric);
  });
}

void rp_sweep_free(rp_sweep* sweep) { delete sweep; }

}  // extern "C"
