#include "scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "util.hpp"

namespace ridepool {

namespace {

const char* kMetricNames[] = {"answer_rate",       "avg_wait_s",        "shared_orders",
                              "shared_distance_km", "empty_distance_km", "certified_fraction",
                              "mean_detour_ratio"};

double metric_value(const Metrics& m, const std::string& name) {
  if (name == "answer_rate") return m.answer_rate;
  if (name == "avg_wait_s") return m.avg_wait_s;
  if (name == "shared_orders") return static_cast<double>(m.shared_orders);
  if (name == "shared_distance_km") return m.shared_distance_km;
  if (name == "empty_distance_km") return m.empty_distance_km;
  if (name == "certified_fraction") return m.certified_fraction;
  if (name == "mean_detour_ratio") return m.mean_detour_ratio;
  fail(Errc::invalid_argument, "unknown metric '" + name + "'");
}

}  // namespace

void apply_override(Scenario& s, const std::string& key, const std::string& value) {
  const std::string ctx = "key '" + key + "'";
  if (key == "network") s.network_path = value;
  else if (key == "demand") s.demand_path = value;
  else if (key == "policy") s.config.policy = policy_from_name(value);
  else if (key == "seed") s.config.seed = static_cast<uint64_t>(parse_int(value, ctx));
  else if (key == "alpha") s.config.alpha = parse_double(value, ctx);
  else if (key == "zeta") s.config.zeta = parse_double(value, ctx);
  else if (key == "eta") s.config.eta = parse_double(value, ctx);
  else if (key == "T_w_s") s.config.wait_threshold_s = parse_double(value, ctx);
  else if (key == "T_m_s") s.config.match_window_s = parse_double(value, ctx);
  else if (key == "fleet_size") s.config.fleet_size = static_cast<int>(parse_int(value, ctx));
  else if (key == "tick_s") s.config.tick_s = parse_double(value, ctx);
  else if (key == "duration_s") s.config.duration_s = parse_double(value, ctx);
  else if (key == "willingness_prob") s.config.willingness_prob = parse_double(value, ctx);
  else if (key == "v_free_ms") s.config.mfd.v_free_ms = parse_double(value, ctx);
  else if (key == "n_jam") s.config.mfd.n_jam = parse_double(value, ctx);
  else if (key == "v_floor_fraction") s.config.mfd.v_floor_fraction = parse_double(value, ctx);
  else if (key == "solver_max_expansions")
    s.config.solver.max_expansions = parse_int(value, ctx);
  else if (key == "solver_time_limit_s") s.config.solver.time_limit_s = parse_double(value, ctx);
  else if (key == "dump_instance_dir") s.config.dump_instance_dir = value;
  else fail(Errc::parse_error, "unknown scenario key '" + key + "'");
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open scenario file: " + path);
  Scenario s;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = trim(line);
    const size_t hash = text.find('#');
    if (hash != std::string_view::npos) text = trim(text.substr(0, hash));
    if (text.empty()) continue;
    const size_t eq = text.find('=');
    if (eq == std::string_view::npos)
      fail(Errc::parse_error, path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(trim(text.substr(0, eq)));
    const std::string value(trim(text.substr(eq + 1)));
    try {
      apply_override(s, key, value);
    } catch (const Error& e) {
      fail(e.code(), path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (s.network_path.empty()) fail(Errc::parse_error, path + ": missing 'network' entry");
  if (s.demand_path.empty()) fail(Errc::parse_error, path + ": missing 'demand' entry");

  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&base](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).string();
  };
  resolve(s.network_path);
  resolve(s.demand_path);
  return s;
}

std::string scenario_template() {
  return R"(# ridepool scenario
# paths are resolved relative to this file
network = network.csv
demand = demand.csv

# routing policy for partially occupied vehicles: proposed | shortest | noshare
policy = proposed

# detour budget multiplier (route length <= alpha * shortest distance)
alpha = 1.2

# matching-probability model
zeta = 1.0
eta = 0.001

# waiting-time threshold T_w and matching window T_m, seconds
T_w_s = 300
T_m_s = 60

fleet_size = 100
tick_s = 1
duration_s = 10800
willingness_prob = 1.0

# speed-accumulation relation
v_free_ms = 10.0
n_jam = 1000
v_floor_fraction = 0.05

seed = 1

# exact solver caps; a time limit > 0 sacrifices reproducibility
solver_max_expansions = 2000000
solver_time_limit_s = 0

# uncomment to dump every planning instance for replay with `ridepool plan`
# dump_instance_dir = instances
)";
}

RunResult run_scenario(const Scenario& scenario, const std::string& out_dir) {
  const RoadNetwork net = load_network(scenario.network_path);
  const DemandTable demand = load_demand(scenario.demand_path);
  const DistanceMatrix dm = DistanceMatrix::floyd_warshall(net);

  std::filesystem::create_directories(out_dir);
  Scenario local = scenario;
  if (!local.config.dump_instance_dir.empty())
    std::filesystem::create_directories(local.config.dump_instance_dir);

  Simulation sim(net, dm, demand, local.config);
  sim.run();

  RunResult result;
  result.events_path = (std::filesystem::path(out_dir) / "events.csv").string();
  result.metrics_kv_path = (std::filesystem::path(out_dir) / "metrics.kv").string();
  result.metrics_table_path = (std::filesystem::path(out_dir) / "metrics.txt").string();

  write_event_log(sim.events(), result.events_path);
  result.metrics = live_metrics(sim);
  const Metrics replayed = compute_metrics(sim.events());
  if (!metrics_equal(result.metrics, replayed))
    fail(Errc::internal, "event-log replay disagrees with live metrics");

  write_text_file(metrics_kv(result.metrics, local.config), result.metrics_kv_path);
  write_text_file(metrics_table(result.metrics), result.metrics_table_path);
  return result;
}

double SweepResult::mean(const std::string& variant, const std::string& metric) const {
  for (size_t i = 0; i < variant_names.size(); ++i) {
    if (variant_names[i] != variant) continue;
    double sum = 0.0;
    long long n = 0;
    for (const SweepCell& cell : cells[i]) {
      if (!cell.ok) continue;
      sum += metric_value(cell.metrics, metric);
      ++n;
    }
    if (n == 0) fail(Errc::invalid_argument, "variant '" + variant + "' has no successful runs");
    return sum / static_cast<double>(n);
  }
  fail(Errc::invalid_argument, "unknown variant '" + variant + "'");
}

double SweepResult::stddev(const std::string& variant, const std::string& metric) const {
  const double mu = mean(variant, metric);
  for (size_t i = 0; i < variant_names.size(); ++i) {
    if (variant_names[i] != variant) continue;
    double acc = 0.0;
    long long n = 0;
    for (const SweepCell& cell : cells[i]) {
      if (!cell.ok) continue;
      const double d = metric_value(cell.metrics, metric) - mu;
      acc += d * d;
      ++n;
    }
    return n > 1 ? std::sqrt(acc / static_cast<double>(n - 1)) : 0.0;
  }
  fail(Errc::invalid_argument, "unknown variant '" + variant + "'");
}

SweepResult sweep(const Scenario& base, const std::vector<SweepVariant>& variants,
                  const std::vector<uint64_t>& seeds, const std::string& out_dir) {
  if (variants.empty()) fail(Errc::invalid_argument, "sweep needs at least one variant");
  if (seeds.empty()) fail(Errc::invalid_argument, "sweep needs at least one seed");

  SweepResult result;
  result.seeds = seeds;
  std::filesystem::create_directories(out_dir);
  for (const SweepVariant& variant : variants) {
    result.variant_names.push_back(variant.name);
    std::vector<SweepCell> row;
    for (uint64_t seed : seeds) {
      Scenario s = base;
      for (const auto& [key, value] : variant.overrides) apply_override(s, key, value);
      s.config.seed = seed;
      const std::string run_dir =
          (std::filesystem::path(out_dir) / variant.name / ("seed_" + std::to_string(seed)))
              .string();
      SweepCell cell;
      try {
        cell.metrics = run_scenario(s, run_dir).metrics;
        cell.ok = true;
      } catch (const Error& e) {
        cell.error = e.what();
      }
      row.push_back(std::move(cell));
    }
    result.cells.push_back(std::move(row));
  }

  write_text_file(sweep_csv(result), (std::filesystem::path(out_dir) / "sweep.csv").string());
  write_text_file(sweep_table(result), (std::filesystem::path(out_dir) / "sweep.txt").string());
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "variant,seeds_ok";
  for (const char* name : kMetricNames) out << ',' << name << "_mean," << name << "_std";
  out << '\n';
  for (size_t i = 0; i < result.variant_names.size(); ++i) {
    long long ok = 0;
    for (const SweepCell& cell : result.cells[i])
      if (cell.ok) ++ok;
    out << result.variant_names[i] << ',' << ok;
    for (const char* name : kMetricNames) {
      if (ok == 0) {
        out << ",,";
        continue;
      }
      out << ',' << format_fixed(result.mean(result.variant_names[i], name), 6) << ','
          << format_fixed(result.stddev(result.variant_names[i], name), 6);
    }
    out << '\n';
  }
  return out.str();
}

std::string sweep_table(const SweepResult& result) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-14s %8s %12s %12s %14s %12s %12s\n", "variant", "runs",
                "answer_rate", "avg_wait_s", "shared_orders", "shared_km", "empty_km");
  out << buf;
  for (size_t i = 0; i < result.variant_names.size(); ++i) {
    const std::string& name = result.variant_names[i];
    long long ok = 0;
    for (const SweepCell& cell : result.cells[i])
      if (cell.ok) ++ok;
    if (ok == 0) {
      std::snprintf(buf, sizeof(buf), "%-14s %8s %12s\n", name.c_str(), "0", "all failed");
      out << buf;
      continue;
    }
    std::snprintf(buf, sizeof(buf), "%-14s %8lld %12.4f %12.1f %14.1f %12.3f %12.3f\n",
                  name.c_str(), ok, result.mean(name, "answer_rate"),
                  result.mean(name, "avg_wait_s"), result.mean(name, "shared_orders"),
                  result.mean(name, "shared_distance_km"), result.mean(name, "empty_distance_km"));
    out << buf;
  }
  return out.str();
}

}  // namespace ridepool
