// Command-line front end; everything goes through the C API in ridepool.h.

#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ridepool.h"

namespace {

[[noreturn]] void die(rp_status status, const std::string& what) {
  std::fprintf(stderr, "error: %s: %s\n", what.c_str(), rp_last_error());
  std::exit(status == RP_OK ? 1 : static_cast<int>(status));
}

void check(rp_status status, const std::string& what) {
  if (status != RP_OK) die(status, what);
}

struct ScenarioArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::string policy;
  uint64_t seed = 0;
  bool seed_set = false;
  bool policy_set = false;
};

rp_scenario* open_scenario(const ScenarioArgs& args) {
  rp_scenario* scenario = nullptr;
  check(rp_scenario_load(args.config_path.c_str(), &scenario), "loading " + args.config_path);
  if (args.seed_set)
    check(rp_scenario_set(scenario, "seed", std::to_string(args.seed).c_str()), "setting seed");
  if (args.policy_set)
    check(rp_scenario_set(scenario, "policy", args.policy.c_str()), "setting policy");
  return scenario;
}

void add_scenario_options(CLI::App* cmd, ScenarioArgs& args) {
  cmd->add_option("--config", args.config_path, "scenario file")->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override the scenario seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--policy", args.policy, "override the policy (proposed|shortest|noshare)")
      ->each([&args](const std::string&) { args.policy_set = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ride-pooling simulation engine and en-route path planner"};
  app.require_subcommand(0, 1);
  std::string template_path;
  app.add_option("--write-template", template_path,
                 "write a documented scenario file with default values and exit");

  // gen-network
  auto* gen_net = app.add_subcommand("gen-network", "generate a grid road network file");
  int rows = 10, cols = 10;
  double edge_len = 100.0;
  std::string net_out = "network.csv";
  gen_net->add_option("--rows", rows, "grid rows");
  gen_net->add_option("--cols", cols, "grid columns");
  gen_net->add_option("--edge-len", edge_len, "edge length in meters");
  gen_net->add_option("--out", net_out, "output file")->required();

  // gen-demand
  auto* gen_dem = app.add_subcommand("gen-demand", "generate a demand table file");
  int d_rows = 10, d_cols = 10, d_pairs = 30;
  double d_rate = 400.0, d_bg = 0.0;
  std::string d_pattern = "corridor";
  std::string d_bins = "0:3600:1";
  uint64_t d_seed = 1;
  std::string dem_out = "demand.csv";
  gen_dem->add_option("--rows", d_rows, "grid rows");
  gen_dem->add_option("--cols", d_cols, "grid columns");
  gen_dem->add_option("--pattern", d_pattern, "corridor|uniform");
  gen_dem->add_option("--rate", d_rate, "total requests per hour");
  gen_dem->add_option("--bins", d_bins, "start:end:multiplier,...");
  gen_dem->add_option("--bg-fraction", d_bg, "background share of the total rate (corridor)");
  gen_dem->add_option("--pairs", d_pairs, "background / uniform OD pair count");
  gen_dem->add_option("--seed", d_seed, "generator seed");
  gen_dem->add_option("--out", dem_out, "output file")->required();

  // run
  auto* run = app.add_subcommand("run", "run one scenario and write metrics + event log");
  ScenarioArgs run_args;
  add_scenario_options(run, run_args);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run policy variants across seeds");
  ScenarioArgs sweep_args;
  add_scenario_options(sweep, sweep_args);
  std::vector<std::string> variant_specs;
  int sweep_seeds = 1;
  std::string seed_list;
  sweep->add_option("--variant", variant_specs,
                    "variant as name or name:key=value,key=value (repeatable)");
  sweep->add_option("--seeds", sweep_seeds, "use seeds 1..N");
  sweep->add_option("--seed-list", seed_list, "comma-separated explicit seeds");

  // plan
  auto* plan = app.add_subcommand("plan", "solve one dumped planning instance");
  std::string instance_path;
  long long max_expansions = 0;
  double time_limit = 0.0;
  plan->add_option("instance", instance_path, "instance file")->required();
  plan->add_option("--max-expansions", max_expansions, "search node cap");
  plan->add_option("--time-limit", time_limit, "wall clock cap in seconds (0 = off)");

  // export-field
  auto* field = app.add_subcommand("export-field", "export the edge probability field of a query");
  ScenarioArgs field_args;
  add_scenario_options(field, field_args);
  int f_origin = 0, f_dest = 0;
  double f_time = 0.0;
  std::string field_out = "field.csv";
  std::string field_instance_out;
  field->add_option("--origin", f_origin, "query origin node")->required();
  field->add_option("--dest", f_dest, "query destination node")->required();
  field->add_option("--time", f_time, "simulation time of the snapshot, seconds");
  field->add_option("--field-out", field_out, "field CSV path");
  field->add_option("--instance-out", field_instance_out, "also dump the planning instance here");

  CLI11_PARSE(app, argc, argv);

  if (!template_path.empty()) {
    size_t len = 0;
    rp_scenario_template(nullptr, 0, &len);
    std::string text(len, '\0');
    check(rp_scenario_template(text.data(), text.size(), nullptr), "formatting template");
    std::FILE* f = std::fopen(template_path.c_str(), "w");
    if (!f) die(RP_ERR_IO, "writing " + template_path);
    std::fputs(text.c_str(), f);
    std::fclose(f);
    std::printf("wrote %s\n", template_path.c_str());
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::fputs(app.help().c_str(), stderr);
    return 1;
  }

  if (gen_net->parsed()) {
    rp_network* net = nullptr;
    check(rp_network_generate_grid(rows, cols, edge_len, &net), "generating grid");
    check(rp_network_save(net, net_out.c_str()), "writing " + net_out);
    std::printf("wrote %s: %d nodes, %d arcs\n", net_out.c_str(), rp_network_node_count(net),
                rp_network_arc_count(net));
    rp_network_free(net);
    return 0;
  }

  if (gen_dem->parsed()) {
    rp_demand* demand = nullptr;
    check(rp_demand_generate(d_pattern.c_str(), d_rows, d_cols, d_rate, d_bins.c_str(), d_bg,
                             d_pairs, d_seed, &demand),
          "generating demand");
    check(rp_demand_save(demand, dem_out.c_str()), "writing " + dem_out);
    std::printf("wrote %s\n", dem_out.c_str());
    rp_demand_free(demand);
    return 0;
  }

  if (run->parsed()) {
    rp_scenario* scenario = open_scenario(run_args);
    rp_metrics* metrics = nullptr;
    check(rp_run_scenario(scenario, run_args.out_dir.c_str(), &metrics), "running scenario");
    size_t len = 0;
    rp_metrics_kv(metrics, nullptr, 0, &len);
    std::string text(len, '\0');
    check(rp_metrics_kv(metrics, text.data(), text.size(), nullptr), "formatting metrics");
    std::fputs(text.c_str(), stdout);
    rp_metrics_free(metrics);
    rp_scenario_free(scenario);
    return 0;
  }

  if (sweep->parsed()) {
    rp_scenario* scenario = open_scenario(sweep_args);
    rp_sweep* sw = nullptr;
    check(rp_sweep_new(scenario, &sw), "creating sweep");
    if (variant_specs.empty())
      variant_specs = {"proposed:policy=proposed", "shortest:policy=shortest",
                       "noshare:policy=noshare"};
    for (const std::string& spec : variant_specs) {
      const size_t colon = spec.find(':');
      const std::string name = colon == std::string::npos ? spec : spec.substr(0, colon);
      const std::string overrides = colon == std::string::npos ? "" : spec.substr(colon + 1);
      check(rp_sweep_add_variant(sw, name.c_str(), overrides.c_str()), "adding variant " + name);
    }
    if (!seed_list.empty()) {
      size_t pos = 0;
      while (pos <= seed_list.size()) {
        const size_t comma = seed_list.find(',', pos);
        const std::string tok =
            seed_list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!tok.empty())
          check(rp_sweep_add_seed(sw, std::strtoull(tok.c_str(), nullptr, 10)), "adding seed");
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    } else {
      for (int k = 1; k <= sweep_seeds; ++k)
        check(rp_sweep_add_seed(sw, static_cast<uint64_t>(k)), "adding seed");
    }
    check(rp_sweep_run(sw, sweep_args.out_dir.c_str()), "running sweep");
    std::printf("sweep written to %s (sweep.csv, sweep.txt)\n", sweep_args.out_dir.c_str());
    rp_sweep_free(sw);
    rp_scenario_free(scenario);
    return 0;
  }

  if (plan->parsed()) {
    rp_instance* inst = nullptr;
    check(rp_instance_load(instance_path.c_str(), &inst), "loading " + instance_path);
    rp_plan* solved = nullptr;
    check(rp_plan_solve(inst, max_expansions, time_limit, &solved), "solving instance");
    std::vector<int> nodes(rp_plan_node_count(solved));
    check(rp_plan_nodes(solved, nodes.data(), nodes.size()), "reading path");
    std::printf("path:");
    for (int n : nodes) std::printf(" %d", n);
    std::printf("\nlength_m: %.6f\nbudget_m: %.6f\nlinear_objective: %.9f\n"
                "exact_objective: %.9f\nstatus: %s\n",
                rp_plan_length_m(solved), rp_instance_budget_m(inst),
                rp_plan_linear_objective(solved), rp_plan_exact_objective(solved),
                rp_plan_certified(solved) ? "certified" : "best-effort");
    rp_plan_free(solved);
    rp_instance_free(inst);
    return 0;
  }

  if (field->parsed()) {
    rp_scenario* scenario = open_scenario(field_args);
    rp_sim* sim = nullptr;
    check(rp_sim_create(scenario, &sim), "creating simulation");
    while (rp_sim_time_s(sim) < f_time) {
      const double before = rp_sim_time_s(sim);
      check(rp_sim_step(sim, 1), "stepping simulation");
      if (rp_sim_time_s(sim) <= before) break;  // horizon reached
    }
    check(rp_sim_export_field(sim, f_origin, f_dest, field_out.c_str()), "exporting field");
    std::printf("wrote %s at t=%.3f s\n", field_out.c_str(), rp_sim_time_s(sim));
    if (!field_instance_out.empty()) {
      check(rp_sim_dump_plan_instance(sim, f_origin, f_dest, field_instance_out.c_str()),
            "dumping instance");
      std::printf("wrote %s\n", field_instance_out.c_str());
    }
    rp_sim_free(sim);
    rp_scenario_free(scenario);
    return 0;
  }

  return 0;
}
