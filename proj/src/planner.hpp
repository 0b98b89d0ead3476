#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "match_model.hpp"
#include "network.hpp"

namespace ridepool {

// Absolute slack on the route-length budget check.
inline constexpr double kBudgetTolM = 1e-6;

struct PrizedArc {
  int from = 0;
  int to = 0;
  double length_m = 0.0;
  double prize = 0.0;  // in [0, 1)
};

// Self-contained prize-collecting instance: maximize the prize sum of an
// elementary origin->dest path whose length stays within the budget.
struct PlanInstance {
  int origin = 0;
  int dest = 0;
  double budget_m = 0.0;
  std::vector<PrizedArc> arcs;  // sorted by (from, to), unique
};

struct SolverConfig {
  long long max_expansions = 2'000'000;
  double time_limit_s = 0.0;  // 0 disables the wall clock cap (keeps runs reproducible)
};

struct PlannedPath {
  std::vector<int> nodes;
  double length_m = 0.0;
  double linear_objective = 0.0;  // sum of arc prizes
  double exact_objective = 0.0;   // 1 - prod(1 - prize)
  bool certified = true;
  long long expansions = 0;
};

struct SubgraphSelection {
  std::vector<int> nodes;    // sorted node ids
  std::vector<int> arc_ids;  // ids into net.arcs(), sorted
};

// Nodes i with Ls(O,i) + Ls(i,D) <= B and arcs (i,j) with
// Ls(O,i) + w_ij + Ls(j,D) <= B; every budget-feasible path survives.
SubgraphSelection budget_reachable_subgraph(const RoadNetwork& net, const DistanceMatrix& dm,
                                            int origin, int dest, double budget_m);

PlanInstance make_plan_instance(const EdgeProbabilityField& field, const RoadNetwork& net);

// Exact solver: depth-first branch and bound with a budget-level relaxation
// bound. Ties break toward smaller length, then the lexicographically
// smaller node sequence. certified=false only when a cap was hit.
PlannedPath plan_route(const PlanInstance& inst, const SolverConfig& config = {});

// Exhaustive elementary-path enumeration under the same tie-break rules.
// Guarded to instances of at most 25 nodes.
PlannedPath enumerate_optimal(const PlanInstance& inst);

double exact_objective(const std::vector<int>& path_nodes, const EdgeProbabilityField& field);
double linearized_objective(const std::vector<int>& path_nodes, const EdgeProbabilityField& field);

// Normative path comparison: higher prize, then shorter, then lexicographic.
bool better_plan(double obj_a, double len_a, const std::vector<int>& nodes_a, double obj_b,
                 double len_b, const std::vector<int>& nodes_b);

PlanInstance load_instance(const std::string& path);
void save_instance(const PlanInstance& inst, const std::string& path);

}  // namespace ridepool
