#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "match_model.hpp"
#include "planner.hpp"
#include "rng.hpp"

using namespace ridepool;

namespace {

ModelParams params_with(double zeta, double eta, double radius) {
  ModelParams p;
  p.zeta = zeta;
  p.eta = eta;
  p.match_radius_m = radius;
  return p;
}

FleetSnapshot snapshot_of(std::vector<VehicleObservation> vehicles) {
  FleetSnapshot snap;
  snap.vehicles = std::move(vehicles);
  return snap;
}

}  // namespace

TEST_CASE("effective supply counts by category with the 0.5 partial weight") {
  const RoadNetwork net = RoadNetwork::grid(3, 3, 100.0);
  const DistanceMatrix dm = DistanceMatrix::floyd_warshall(net);
  const ModelParams params = params_with(1.0, 0.001, 150.0);

  CHECK(effective_supply(4, snapshot_of({}), dm, params) == 0.0);

  const FleetSnapshot snap = snapshot_of({
      {0, 4, SupplyCategory::empty},
      {1, 3, SupplyCategory::empty},
      {2, 5, SupplyCategory::dropping},
      {3, 1, SupplyCategory::partial},
      {4, 8, SupplyCategory::partial},    // dist 200 > radius
      {5, 4, SupplyCategory::uncounted},  // never counted
  });
  CHECK(effective_supply(4, snap, dm, params) == 3.5);
}

TEST_CASE("effective supply equals the brute-force distance filter") {
  const RoadNetwork net = RoadNetwork::grid(5, 5, 100.0);
  const DistanceMatrix dm = DistanceMatrix::floyd_warshall(net);
  Rng rng(4242);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<VehicleObservation> vehicles;
    const int count = static_cast<int>(rng.uniform_index(12));
    for (int v = 0; v < count; ++v) {
      const auto cat = static_cast<SupplyCategory>(rng.uniform_index(4));
      vehicles.push_back({v, static_cast<int>(rng.uniform_index(25)), cat});
    }
    const ModelParams params = params_with(1.0, 0.001, 100.0 + 100.0 * rng.uniform_index(5));
    const int node = static_cast<int>(rng.uniform_index(25));

    double expected = 0.0;
    for (const VehicleObservation& v : vehicles) {
      if (dm.dist(v.node, node) > params.match_radius_m) continue;
      if (v.category == SupplyCategory::empty) expected += 1.0;
      if (v.category == SupplyCategory::dropping) expected += 1.0;
      if (v.category == SupplyCategory::partial) expected += 0.5;
    }
    CHECK(effective_supply(node, snapshot_of(vehicles), dm, params) == expected);
  }
}

TEST_CASE("node match probability analytic values and limits") {
  const ModelParams unit = params_with(1.0, 1.0, 1.0);
  CHECK(node_match_probability(0.0, 5.0, unit) == 0.0);
  CHECK(node_match_probability(std::log(2.0), 1.0, unit) == doctest::Approx(0.5).epsilon(1e-12));

  const ModelParams paper = params_with(1.0, 0.001, 1.0);
  CHECK(node_match_probability(0.01, 10.0, paper) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));

  // n = 0 limits, by continuity in lambda
  CHECK(node_match_probability(0.5, 0.0, unit) == 1.0);
  CHECK(node_match_probability(0.0, 0.0, unit) == 0.0);
  const ModelParams half = params_with(0.5, 1.0, 1.0);
  CHECK(node_match_probability(0.0, 0.0, half) == 0.5);
}

TEST_CASE("node match probability stays in [1-zeta, 1] and is monotone") {
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const double zeta = rng.uniform(0.05, 1.0);
    const ModelParams params = params_with(zeta, rng.uniform(0.001, 2.0), 1.0);
    const double lambda = rng.uniform(0.0, 10.0);
    const double n = rng.uniform(0.0, 10.0);
    const double p = node_match_probability(lambda, n, params);
    CHECK(p >= 1.0 - zeta - 1e-15);
    CHECK(p <= 1.0);
    CHECK(node_match_probability(lambda + 0.5, n, params) >= p);
    if (n > 0.0) CHECK(node_match_probability(lambda, n + 0.5, params) <= p);
  }
}

TEST_CASE("edge match probability averages its endpoints") {
  CHECK(edge_match_probability(0.0, 0.0) == 0.0);
  CHECK(edge_match_probability(0.2, 0.4) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(edge_match_probability(1.0, 1.0) == 1.0);
}

TEST_CASE("edge pickup probability") {
  CHECK(edge_pickup_probability(0.0, 5.0) == 0.0);
  CHECK(edge_pickup_probability(0.5, 2.0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(edge_pickup_probability(0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-12));

  long long clamps = 0;
  const double p = edge_pickup_probability(1.0, 3.0, &clamps);
  CHECK(clamps == 1);
  CHECK(p <= kMaxProbability);
  CHECK(p > 0.999);

  // monotone in both arguments
  Rng rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const double pe = rng.uniform(0.0, 0.95);
    const double t = rng.uniform(0.1, 50.0);
    const double base = edge_pickup_probability(pe, t);
    CHECK(edge_pickup_probability(pe + 0.02, t) >= base);
    CHECK(edge_pickup_probability(pe, t + 1.0) >= base);
    CHECK(base >= 0.0);
    CHECK(base <= kMaxProbability);
  }
}

TEST_CASE("probability field is identically zero without demand") {
  const RoadNetwork net = RoadNetwork::grid(3, 3, 100.0);
  const DistanceMatrix dm = DistanceMatrix::floyd_warshall(net);
  const DemandTable empty = DemandTable::from_rows({{0.0, 3600.0, 0, 1, 0.0}});
  const FleetSnapshot snap = snapshot_of({{0, 4, SupplyCategory::empty}});
  const ModelParams params = params_with(1.0, 0.001, 500.0);

  const EdgeProbabilityField field =
      build_probability_field({0, 8, 10.0}, 1.5, snap, empty, net, dm, params, 10.0);
  CHECK(!field.rows.empty());
  for (const FieldRow& r : field.rows) {
    CHECK(r.pickup_probability == 0.0);
    CHECK(r.p_edge == 0.0);
  }
}

TEST_CASE("empty fleet with demand saturates the field via the limit rule") {
  const RoadNetwork net = RoadNetwork::grid(3, 3, 100.0);
  const DistanceMatrix dm = DistanceMatrix::floyd_warshall(net);
  std::vector<DemandRow> rows;
  for (int o = 0; o < 9; ++o)
    for (int d = 0; d < 9; ++d)
      if (o != d) rows.push_back({0.0, 3600.0, o, d, 1.0});
  const DemandTable demand = DemandTable::from_rows(rows);
  const ModelParams params = params_with(1.0, 0.001, 500.0);

  const EdgeProbabilityField field =
      build_probability_field({0, 8, 10.0}, 1.5, snapshot_of({}), demand, net, dm, params, 10.0);
  CHECK(field.clamp_count > 0);
  for (const FieldRow& r : field.rows) {
    CHECK(r.p_node_from == 1.0);
    CHECK(r.pickup_probability > 0.999);
    CHECK(r.pickup_probability <= kMaxProbability);
  }
}

TEST_CASE("field matches a straight-line recomputation on a 3x3 grid") {
  const RoadNetwork net = RoadNetwork::grid(3, 3, 100.0);
  const DistanceMatrix dm = DistanceMatrix::floyd_warshall(net);
  const DemandTable demand = DemandTable::from_rows({
      {0.0, 3600.0, 1, 2, 4.0},
      {0.0, 3600.0, 4, 5, 6.0},
      {0.0, 3600.0, 7, 0, 2.5},
  });
  const FleetSnapshot snap = snapshot_of({
      {0, 1, SupplyCategory::empty},
      {1, 4, SupplyCategory::partial},
      {2, 7, SupplyCategory::dropping},
  });
  const ModelParams params = params_with(0.9, 2.0, 250.0);
  const TripQuery q{0, 8, 60.0};
  const double speed = 8.0;
  const double alpha = 1.4;

  const EdgeProbabilityField field =
      build_probability_field(q, alpha, snap, demand, net, dm, params, speed);

  // Independent recomputation, one arc at a time.
  const double budget = alpha * dm.dist(0, 8);
  CHECK(field.budget_m == budget);
  auto p_node_direct = [&](int i) {
    double lambda = 0.0;
    for (const DemandEntry& e : demand.bins()[0].entries) {
      if (e.origin != i) continue;
      const double pooled = std::min(
          dm.dist(q.origin, i) + dm.dist(i, e.dest) + dm.dist(e.dest, q.dest),
          dm.dist(q.origin, i) + dm.dist(i, q.dest) + dm.dist(q.dest, e.dest));
      lambda += e.rate_per_hour * (dm.dist(q.origin, q.dest) + dm.dist(i, e.dest)) / (2.0 * pooled);
    }
    double n = 0.0;
    for (const VehicleObservation& v : snap.vehicles) {
      if (dm.dist(v.node, i) > params.match_radius_m) continue;
      if (v.category == SupplyCategory::empty || v.category == SupplyCategory::dropping) n += 1.0;
      if (v.category == SupplyCategory::partial) n += 0.5;
    }
    if (n == 0.0) return lambda > 0.0 ? 1.0 : 1.0 - params.zeta;
    return 1.0 - params.zeta * std::exp(-lambda / (params.eta * n));
  };

  REQUIRE(!field.rows.empty());
  for (const FieldRow& r : field.rows) {
    const double pi = p_node_direct(r.from);
    const double pj = p_node_direct(r.to);
    const double pe = (pi + pj) / 2.0;
    const double tt = net.arc_length(r.from, r.to) / speed;
    const double expect = 1.0 - std::pow(1.0 - pe, tt);
    CHECK(r.p_node_from == doctest::Approx(pi).epsilon(1e-12));
    CHECK(r.p_node_to == doctest::Approx(pj).epsilon(1e-12));
    CHECK(r.p_edge == doctest::Approx(pe).epsilon(1e-12));
    CHECK(r.travel_time_s == doctest::Approx(tt).epsilon(1e-12));
    CHECK(r.pickup_probability == doctest::Approx(expect).epsilon(1e-12));
    CHECK(r.pickup_probability >= 0.0);
    CHECK(r.pickup_probability <= kMaxProbability);
  }

  // The field covers exactly the budget-reachable subgraph.
  const SubgraphSelection sub = budget_reachable_subgraph(net, dm, q.origin, q.dest, budget);
  CHECK(field.rows.size() == sub.arc_ids.size());
  CHECK(field.nodes == sub.nodes);
}

TEST_CASE("field export writes the documented columns") {
  const RoadNetwork net = RoadNetwork::grid(2, 2, 100.0);
  const DistanceMatrix dm = DistanceMatrix::floyd_warshall(net);
  const DemandTable demand = DemandTable::from_rows({{0.0, 3600.0, 1, 3, 5.0}});
  const EdgeProbabilityField field = build_probability_field(
      {0, 3, 0.0}, 1.0, snapshot_of({{0, 0, SupplyCategory::empty}}), demand, net, dm,
      params_with(1.0, 1.0, 400.0), 10.0);
  const std::string path = "field_test.csv";
  export_field_csv(field, path);
  std::FILE* f = std::fopen(path.c_str(), "r");
  REQUIRE(f != nullptr);
  char header[128] = {0};
  REQUIRE(std::fgets(header, sizeof(header), f) != nullptr);
  std::fclose(f);
  CHECK(std::string(header) == "from,to,p_node_from,p_node_to,p_edge,travel_time_s,P_ij\n");
  std::remove(path.c_str());
}
