#include "match_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "planner.hpp"
#include "util.hpp"

namespace ridepool {

SupplyCounts supply_counts(int node, const FleetSnapshot& fleet, const DistanceMatrix& dm,
                           const ModelParams& params) {
  if (!(params.match_radius_m > 0.0))
    fail(Errc::invalid_argument, "match radius must be positive");
  SupplyCounts counts;
  for (const VehicleObservation& v : fleet.vehicles) {
    if (v.category == SupplyCategory::uncounted) continue;
    const double d = dm.dist(v.node, node);
    if (d > params.match_radius_m) continue;
    switch (v.category) {
      case SupplyCategory::empty: ++counts.empty; break;
      case SupplyCategory::dropping: ++counts.dropping; break;
      case SupplyCategory::partial: ++counts.partial; break;
      case SupplyCategory::uncounted: break;
    }
  }
  return counts;
}

double effective_supply(int node, const FleetSnapshot& fleet, const DistanceMatrix& dm,
                        const ModelParams& params) {
  return supply_counts(node, fleet, dm, params).effective();
}

double node_match_probability(double lambda_att, double n_effective, const ModelParams& params) {
  if (!(params.zeta > 0.0) || params.zeta > 1.0)
    fail(Errc::invalid_argument, "zeta must lie in (0,1]");
  if (!(params.eta > 0.0)) fail(Errc::invalid_argument, "eta must be positive");
  if (lambda_att < 0.0 || n_effective < 0.0)
    fail(Errc::invalid_argument, "lambda and supply must be non-negative");

  if (n_effective == 0.0) return lambda_att > 0.0 ? 1.0 : 1.0 - params.zeta;
  return 1.0 - params.zeta * std::exp(-lambda_att / (params.eta * n_effective));
}

double edge_match_probability(double p_from, double p_to) {
  if (p_from < 0.0 || p_from > 1.0 || p_to < 0.0 || p_to > 1.0)
    fail(Errc::invalid_argument, "node probabilities must lie in [0,1]");
  return (p_from + p_to) / 2.0;
}

double edge_pickup_probability(double p_edge, double travel_time_s, long long* clamp_counter) {
  if (p_edge < 0.0 || p_edge > 1.0)
    fail(Errc::invalid_argument, "edge probability must lie in [0,1]");
  if (!(travel_time_s > 0.0)) fail(Errc::invalid_argument, "travel time must be positive");

  if (p_edge > kMaxProbability) {
    p_edge = kMaxProbability;
    if (clamp_counter) ++*clamp_counter;
  }
  const double p = 1.0 - std::pow(1.0 - p_edge, travel_time_s);
  return std::min(p, kMaxProbability);
}

const FieldRow* EdgeProbabilityField::find(int from, int to) const {
  const auto it = std::lower_bound(rows.begin(), rows.end(), std::make_pair(from, to),
                                   [](const FieldRow& r, const std::pair<int, int>& key) {
                                     return r.from != key.first ? r.from < key.first
                                                                : r.to < key.second;
                                   });
  if (it == rows.end() || it->from != from || it->to != to) return nullptr;
  return &*it;
}

EdgeProbabilityField build_probability_field(const TripQuery& query, double alpha,
                                             const FleetSnapshot& fleet, const DemandTable& table,
                                             const RoadNetwork& net, const DistanceMatrix& dm,
                                             const ModelParams& params, double speed_ms,
                                             AttractivenessAudit* audit) {
  if (!(speed_ms > 0.0)) fail(Errc::nonpositive_speed, "speed must be positive");
  if (!(alpha >= 1.0)) fail(Errc::invalid_argument, "alpha must be >= 1");
  const double direct = dm.dist(query.origin, query.dest);
  if (direct == kInf)
    fail(Errc::unreachable, "destination " + std::to_string(query.dest) +
                                " unreachable from origin " + std::to_string(query.origin));

  EdgeProbabilityField field;
  field.query = query;
  field.budget_m = alpha * direct;
  field.speed_ms = speed_ms;

  const SubgraphSelection sub =
      budget_reachable_subgraph(net, dm, query.origin, query.dest, field.budget_m);
  field.nodes = sub.nodes;

  std::vector<double> p_node(static_cast<size_t>(net.node_count()), -1.0);
  for (int node : sub.nodes) {
    const double lambda = attractiveness(query, node, table, dm, audit);
    const double supply = effective_supply(node, fleet, dm, params);
    p_node[static_cast<size_t>(node)] = node_match_probability(lambda, supply, params);
  }

  field.rows.reserve(sub.arc_ids.size());
  for (int arc_id : sub.arc_ids) {
    const Arc& a = net.arc(arc_id);
    FieldRow row;
    row.from = a.from;
    row.to = a.to;
    row.p_node_from = p_node[static_cast<size_t>(a.from)];
    row.p_node_to = p_node[static_cast<size_t>(a.to)];
    row.p_edge = edge_match_probability(row.p_node_from, row.p_node_to);
    row.travel_time_s = edge_travel_time(a.length_m, speed_ms);
    row.pickup_probability =
        edge_pickup_probability(row.p_edge, row.travel_time_s, &field.clamp_count);
    field.rows.push_back(row);
  }
  return field;
}

void export_field_csv(const EdgeProbabilityField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write field file: " + path);
  out << "from,to,p_node_from,p_node_to,p_edge,travel_time_s,P_ij\n";
  for (const FieldRow& r : field.rows)
    out << r.from << ',' << r.to << ',' << format_fixed(r.p_node_from, 9) << ','
        << format_fixed(r.p_node_to, 9) << ',' << format_fixed(r.p_edge, 9) << ','
        << format_fixed(r.travel_time_s, 6) << ',' << format_fixed(r.pickup_probability, 9)
        << '\n';
  if (!out) fail(Errc::io_error, "write failed: " + path);
}

}  // namespace ridepool
