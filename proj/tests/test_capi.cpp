// Exercises the shared-library surface the CLI is built on.

#include <cassert>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "ridepool.h"

#define REQUIRE(cond)                                                        \
  do {                                                                       \
    if (!(cond)) {                                                           \
      std::fprintf(stderr, "FAILED %s:%d: %s (last error: %s)\n", __FILE__,  \
                   __LINE__, #cond, rp_last_error());                        \
      return 1;                                                              \
    }                                                                        \
  } while (0)

int main() {
  REQUIRE(rp_version() != nullptr);

  // Error paths surface codes and messages.
  rp_network* missing = nullptr;
  REQUIRE(rp_network_load("no_such_file.csv", &missing) == RP_ERR_IO);
  REQUIRE(std::strlen(rp_last_error()) > 0);

  rp_network* net = nullptr;
  REQUIRE(rp_network_generate_grid(4, 4, 100.0, &net) == RP_OK);
  REQUIRE(rp_network_node_count(net) == 16);
  REQUIRE(rp_network_arc_count(net) == 48);

  rp_distances* dm = nullptr;
  REQUIRE(rp_distances_compute(net, &dm) == RP_OK);
  double d = 0.0;
  REQUIRE(rp_distances_get(dm, 0, 15, &d) == RP_OK);
  REQUIRE(d == 600.0);
  int nodes[32];
  size_t len = 0;
  REQUIRE(rp_distances_path(dm, 0, 15, nodes, 32, &len) == RP_OK);
  REQUIRE(len == 7);
  REQUIRE(nodes[0] == 0 && nodes[6] == 15);

  rp_demand* demand = nullptr;
  REQUIRE(rp_demand_generate("uniform", 4, 4, 120.0, "0:600:1", 0.0, 8, 3, &demand) == RP_OK);
  REQUIRE(rp_demand_save(demand, "capi_demand.csv") == RP_OK);
  rp_demand* demand_back = nullptr;
  REQUIRE(rp_demand_load("capi_demand.csv", &demand_back) == RP_OK);
  rp_demand_free(demand_back);
  std::remove("capi_demand.csv");

  // A small instance file, solved through the C surface.
  {
    std::FILE* f = std::fopen("capi_instance.txt", "w");
    REQUIRE(f != nullptr);
    std::fputs("ridepool-instance v1\norigin 0\ndest 3\nbudget_m 4\narcs 5\n"
               "0 1 1 0.10\n1 3 1 0.10\n0 2 1 0.05\n2 3 1 0.05\n1 2 1 0.20\n",
               f);
    std::fclose(f);
  }
  rp_instance* inst = nullptr;
  REQUIRE(rp_instance_load("capi_instance.txt", &inst) == RP_OK);
  REQUIRE(rp_instance_arc_count(inst) == 5);
  REQUIRE(rp_instance_budget_m(inst) == 4.0);
  rp_plan* plan = nullptr;
  REQUIRE(rp_plan_solve(inst, 0, 0.0, &plan) == RP_OK);
  REQUIRE(rp_plan_certified(plan) == 1);
  // 0 -> 1 -> 2 -> 3 collects 0.10 + 0.20 + 0.05 within the budget of 4.
  REQUIRE(rp_plan_node_count(plan) == 4);
  int path[8];
  REQUIRE(rp_plan_nodes(plan, path, 8) == RP_OK);
  REQUIRE(path[0] == 0 && path[1] == 1 && path[2] == 2 && path[3] == 3);
  REQUIRE(std::fabs(rp_plan_linear_objective(plan) - 0.35) < 1e-12);
  rp_plan_free(plan);
  rp_instance_free(inst);
  std::remove("capi_instance.txt");

  // Scenario template round-trips through the buffer API.
  size_t need = 0;
  REQUIRE(rp_scenario_template(nullptr, 0, &need) == RP_OK);
  REQUIRE(need > 100);
  std::string tmpl(need, '\0');
  REQUIRE(rp_scenario_template(tmpl.data(), tmpl.size(), nullptr) == RP_OK);
  REQUIRE(tmpl.find("policy = proposed") != std::string::npos);

  // Full scenario flow: run, metrics, stepping, field export, sweep.
  REQUIRE(rp_network_save(net, "capi_net.csv") == RP_OK);
  REQUIRE(rp_demand_save(demand, "capi_demand.csv") == RP_OK);
  {
    std::FILE* f = std::fopen("capi_scenario.cfg", "w");
    REQUIRE(f != nullptr);
    std::fputs("network = capi_net.csv\ndemand = capi_demand.csv\npolicy = proposed\n"
               "fleet_size = 3\nduration_s = 300\ntick_s = 1\neta = 2\nseed = 9\n",
               f);
    std::fclose(f);
  }
  rp_scenario* scenario = nullptr;
  REQUIRE(rp_scenario_load("capi_scenario.cfg", &scenario) == RP_OK);
  REQUIRE(rp_scenario_set(scenario, "seed", "12") == RP_OK);
  REQUIRE(rp_scenario_set(scenario, "bogus_key", "1") == RP_ERR_PARSE);

  rp_metrics* metrics = nullptr;
  REQUIRE(rp_run_scenario(scenario, "capi_out", &metrics) == RP_OK);
  double issued = -1.0;
  REQUIRE(rp_metrics_get(metrics, "issued", &issued) == RP_OK);
  REQUIRE(issued >= 0.0);
  REQUIRE(rp_metrics_get(metrics, "nope", &issued) == RP_ERR_INVALID_ARGUMENT);
  size_t kv_len = 0;
  REQUIRE(rp_metrics_kv(metrics, nullptr, 0, &kv_len) == RP_OK);
  REQUIRE(kv_len > 50);
  rp_metrics_free(metrics);

  rp_sim* sim = nullptr;
  REQUIRE(rp_sim_create(scenario, &sim) == RP_OK);
  REQUIRE(rp_sim_step(sim, 30) == RP_OK);
  REQUIRE(rp_sim_time_s(sim) == 30.0);
  REQUIRE(rp_sim_export_field(sim, 0, 15, "capi_field.csv") == RP_OK);
  REQUIRE(rp_sim_dump_plan_instance(sim, 0, 15, "capi_dump.txt") == RP_OK);
  rp_instance* dumped = nullptr;
  REQUIRE(rp_instance_load("capi_dump.txt", &dumped) == RP_OK);
  REQUIRE(rp_instance_arc_count(dumped) > 0);
  rp_instance_free(dumped);
  rp_sim_free(sim);

  rp_sweep* sweep = nullptr;
  REQUIRE(rp_sweep_new(scenario, &sweep) == RP_OK);
  REQUIRE(rp_sweep_add_variant(sweep, "a", "policy=shortest") == RP_OK);
  REQUIRE(rp_sweep_add_variant(sweep, "b", "policy=noshare,fleet_size=4") == RP_OK);
  REQUIRE(rp_sweep_add_seed(sweep, 1) == RP_OK);
  REQUIRE(rp_sweep_add_seed(sweep, 2) == RP_OK);
  REQUIRE(rp_sweep_run(sweep, "capi_sweep") == RP_OK);
  double mean = -1.0, sd = -1.0;
  REQUIRE(rp_sweep_cell(sweep, "b", "shared_orders", &mean, &sd) == RP_OK);
  REQUIRE(mean == 0.0);
  rp_sweep_free(sweep);
  rp_scenario_free(scenario);

  std::remove("capi_net.csv");
  std::remove("capi_demand.csv");
  std::remove("capi_scenario.cfg");
  std::remove("capi_field.csv");
  std::remove("capi_dump.txt");

  rp_distances_free(dm);
  rp_network_free(net);
  rp_demand_free(demand);
  std::puts("capi tests passed");
  return 0;
}
