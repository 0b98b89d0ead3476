/* C interface to the ride-pooling simulation engine and en-route planner.
 * All functions return rp_status; rp_last_error() describes the most recent
 * failure on the calling thread. Out-parameters are written only on RP_OK.
 * Every handle obtained from a rp_*_new/load/... call must be released with
 * the matching rp_*_free. */

#ifndef RIDEPOOL_H
#define RIDEPOOL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rp_status {
  RP_OK = 0,
  RP_ERR_IO = 1,
  RP_ERR_PARSE = 2,
  RP_ERR_INVALID_ARGUMENT = 3,
  RP_ERR_MALFORMED_RECORD = 4,
  RP_ERR_DUPLICATE_ARC = 5,
  RP_ERR_SELF_LOOP = 6,
  RP_ERR_NONPOSITIVE_LENGTH = 7,
  RP_ERR_NODE_GAP = 8,
  RP_ERR_NONPOSITIVE_SPEED = 9,
  RP_ERR_UNREACHABLE = 10,
  RP_ERR_BIN_NOT_COVERED = 11,
  RP_ERR_MISSING_ARC_PRIZE = 12,
  RP_ERR_INSTANCE_TOO_LARGE = 13,
  RP_ERR_INTERNAL = 14,
} rp_status;

const char* rp_version(void);
const char* rp_last_error(void);

/* ---- road network ---- */

typedef struct rp_network rp_network;

rp_status rp_network_load(const char* path, rp_network** out);
rp_status rp_network_generate_grid(int rows, int cols, double edge_length_m, rp_network** out);
rp_status rp_network_save(const rp_network* net, const char* path);
int rp_network_node_count(const rp_network* net);
int rp_network_arc_count(const rp_network* net);
void rp_network_free(rp_network* net);

/* ---- all-pairs shortest distances ---- */

typedef struct rp_distances rp_distances;

rp_status rp_distances_compute(const rp_network* net, rp_distances** out);
rp_status rp_distances_get(const rp_distances* dm, int from, int to, double* out_meters);
/* Writes the node sequence into `nodes` (capacity `cap`); `*out_len` is the
 * full path length. Returns RP_ERR_UNREACHABLE when no path exists. */
rp_status rp_distances_path(const rp_distances* dm, int from, int to, int* nodes, size_t cap,
                            size_t* out_len);
void rp_distances_free(rp_distances* dm);

/* ---- demand ---- */

typedef struct rp_demand rp_demand;

rp_status rp_demand_load(const char* path, rp_demand** out);
rp_status rp_demand_save(const rp_demand* demand, const char* path);
/* pattern: "corridor" (needs rows/cols) or "uniform" (needs node count in
 * rows*cols). bins_spec: "start:end:multiplier,...". */
rp_status rp_demand_generate(const char* pattern, int rows, int cols, double total_rate_per_hour,
                             const char* bins_spec, double bg_fraction, int pairs, uint64_t seed,
                             rp_demand** out);
void rp_demand_free(rp_demand* demand);

/* ---- planner ---- */

typedef struct rp_instance rp_instance;
typedef struct rp_plan rp_plan;

rp_status rp_instance_load(const char* path, rp_instance** out);
rp_status rp_instance_save(const rp_instance* inst, const char* path);
int rp_instance_arc_count(const rp_instance* inst);
double rp_instance_budget_m(const rp_instance* inst);
void rp_instance_free(rp_instance* inst);

rp_status rp_plan_solve(const rp_instance* inst, long long max_expansions, double time_limit_s,
                        rp_plan** out);
double rp_plan_length_m(const rp_plan* plan);
double rp_plan_linear_objective(const rp_plan* plan);
double rp_plan_exact_objective(const rp_plan* plan);
int rp_plan_certified(const rp_plan* plan);
size_t rp_plan_node_count(const rp_plan* plan);
rp_status rp_plan_nodes(const rp_plan* plan, int* nodes, size_t cap);
void rp_plan_free(rp_plan* plan);

/* ---- scenarios, runs, sweeps ---- */

typedef struct rp_scenario rp_scenario;
typedef struct rp_metrics rp_metrics;
typedef struct rp_sim rp_sim;
typedef struct rp_sweep rp_sweep;

rp_status rp_scenario_load(const char* path, rp_scenario** out);
rp_status rp_scenario_set(rp_scenario* scenario, const char* key, const char* value);
rp_status rp_scenario_template(char* buffer, size_t cap, size_t* out_len);
void rp_scenario_free(rp_scenario* scenario);

/* Runs to completion and writes events.csv, metrics.kv, metrics.txt. */
rp_status rp_run_scenario(const rp_scenario* scenario, const char* out_dir, rp_metrics** out);
rp_status rp_metrics_get(const rp_metrics* metrics, const char* key, double* out_value);
rp_status rp_metrics_kv(const rp_metrics* metrics, char* buffer, size_t cap, size_t* out_len);
void rp_metrics_free(rp_metrics* metrics);

/* Stepping interface, used to export probability fields mid-run. */
rp_status rp_sim_create(const rp_scenario* scenario, rp_sim** out);
rp_status rp_sim_step(rp_sim* sim, long long ticks);
double rp_sim_time_s(const rp_sim* sim);
rp_status rp_sim_export_field(const rp_sim* sim, int origin, int dest, const char* path);
rp_status rp_sim_dump_plan_instance(const rp_sim* sim, int origin, int dest, const char* path);
void rp_sim_free(rp_sim* sim);

rp_status rp_sweep_new(const rp_scenario* base, rp_sweep** out);
/* overrides: "key=value,key=value" applied on top of the base scenario. */
rp_status rp_sweep_add_variant(rp_sweep* sweep, const char* name, const char* overrides);
rp_status rp_sweep_add_seed(rp_sweep* sweep, uint64_t seed);
rp_status rp_sweep_run(rp_sweep* sweep, const char* out_dir);
rp_status rp_sweep_cell(const rp_sweep* sweep, const char* variant, const char* metric,
                        double* out_mean, double* out_std);
void rp_sweep_free(rp_sweep* sweep);

#ifdef __cplusplus
}
#endif

#endif /* RIDEPOOL_H */
