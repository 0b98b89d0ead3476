#pragma once

#include <string>
#include <vector>

#include "demand.hpp"
#include "network.hpp"

namespace ridepool {

struct ModelParams {
  double zeta = 1.0;            // in (0,1]
  double eta = 0.001;           // > 0
  double match_radius_m = 0.0;  // > 0
};

enum class SupplyCategory { empty, dropping, partial, uncounted };

struct VehicleObservation {
  int vehicle_id = -1;
  int node = -1;  // mid-arc vehicles observe at the downstream node
  SupplyCategory category = SupplyCategory::uncounted;
};

struct CommittedRoute {
  int vehicle_id = -1;
  std::vector<int> nodes;
};

struct FleetSnapshot {
  double time_s = 0.0;
  std::vector<VehicleObservation> vehicles;
  std::vector<CommittedRoute> planned_routes;
};

struct SupplyCounts {
  int empty = 0;
  int dropping = 0;
  int partial = 0;
  double effective() const { return empty + dropping + 0.5 * partial; }
};

// Vehicles whose network distance (vehicle -> node) is within the match radius.
SupplyCounts supply_counts(int node, const FleetSnapshot& fleet, const DistanceMatrix& dm,
                           const ModelParams& params);
double effective_supply(int node, const FleetSnapshot& fleet, const DistanceMatrix& dm,
                        const ModelParams& params);

// p = 1 - zeta * exp(-lambda / (eta * n)); n = 0 resolves by continuity in lambda.
double node_match_probability(double lambda_att, double n_effective, const ModelParams& params);

double edge_match_probability(double p_from, double p_to);

// Probability of at least one match over the edge traversal. Degenerate
// p_edge = 1 is clamped to 1 - 1e-12 and counted when a counter is supplied.
double edge_pickup_probability(double p_edge, double travel_time_s,
                               long long* clamp_counter = nullptr);

inline constexpr double kMaxProbability = 1.0 - 1e-12;

struct FieldRow {
  int from = 0;
  int to = 0;
  double p_node_from = 0.0;
  double p_node_to = 0.0;
  double p_edge = 0.0;
  double travel_time_s = 0.0;
  double pickup_probability = 0.0;
};

// Per-arc second-pickup probabilities over the budget-reachable subgraph of
// one trip query, frozen at the query timestamp.
struct EdgeProbabilityField {
  TripQuery query;
  double budget_m = 0.0;
  double speed_ms = 0.0;
  std::vector<int> nodes;     // sorted
  std::vector<FieldRow> rows; // sorted by (from, to)
  long long clamp_count = 0;

  const FieldRow* find(int from, int to) const;
};

EdgeProbabilityField build_probability_field(const TripQuery& query, double alpha,
                                             const FleetSnapshot& fleet, const DemandTable& table,
                                             const RoadNetwork& net, const DistanceMatrix& dm,
                                             const ModelParams& params, double speed_ms,
                                             AttractivenessAudit* audit = nullptr);

void export_field_csv(const EdgeProbabilityField& field, const std::string& path);

}  // namespace ridepool
