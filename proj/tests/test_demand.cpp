#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <queue>
#include <set>
#include <sstream>

#include "demand.hpp"
#include "network.hpp"
#include "rng.hpp"

using namespace ridepool;

namespace {

RoadNetwork line_graph(int n) {
  std::vector<Arc> arcs;
  for (int i = 0; i + 1 < n; ++i) {
    arcs.push_back({i, i + 1, 1.0});
    arcs.push_back({i + 1, i, 1.0});
  }
  return RoadNetwork::from_records(arcs);
}

// Independent distances for the pooled-distance oracle.
std::vector<std::vector<double>> oracle_distances(const RoadNetwork& net) {
  std::vector<std::vector<double>> all;
  for (int src = 0; src < net.node_count(); ++src) {
    std::vector<double> dist(static_cast<size_t>(net.node_count()), kInf);
    dist[static_cast<size_t>(src)] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.push({0.0, src});
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d > dist[static_cast<size_t>(u)]) continue;
      for (int arc_id : net.out_arcs(u)) {
        const Arc& a = net.arc(arc_id);
        if (d + a.length_m < dist[static_cast<size_t>(a.to)]) {
          dist[static_cast<size_t>(a.to)] = d + a.length_m;
          heap.push({dist[static_cast<size_t>(a.to)], a.to});
        }
      }
    }
    all.push_back(std::move(dist));
  }
  return all;
}

RoadNetwork random_connected_graph(int nodes, int extra_arcs, Rng& rng) {
  std::vector<Arc> arcs;
  std::set<std::pair<int, int>> used;
  auto add = [&](int a, int b, double len) {
    if (a == b || used.count({a, b})) return;
    used.insert({a, b});
    arcs.push_back({a, b, len});
  };
  for (int i = 0; i + 1 < nodes; ++i) {
    const double len = static_cast<double>(1 + rng.uniform_index(50));
    add(i, i + 1, len);
    add(i + 1, i, len);
  }
  for (int k = 0; k < extra_arcs; ++k)
    add(static_cast<int>(rng.uniform_index(static_cast<uint64_t>(nodes))),
        static_cast<int>(rng.uniform_index(static_cast<uint64_t>(nodes))),
        static_cast<double>(1 + rng.uniform_index(50)));
  return RoadNetwork::from_records(arcs);
}

DemandTable single_entry_table(int origin, int dest, double rate) {
  return DemandTable::from_rows({{0.0, 3600.0, origin, dest, rate}});
}

}  // namespace

TEST_CASE("pooled distance of a perfectly aligned second trip") {
  const RoadNetwork net = line_graph(4);
  const DistanceMatrix dm = DistanceMatrix::floyd_warshall(net);
  CHECK(pooled_distance(0, 3, 0, 3, dm) == dm.dist(0, 3));
}

TEST_CASE("pooled distance of a nested trip on a line") {
  const RoadNetwork net = line_graph(4);
  const DistanceMatrix dm = DistanceMatrix::floyd_warshall(net);
  CHECK(pooled_distance(0, 3, 1, 2, dm) == 3.0);
}

TEST_CASE("pooled distance agrees with the two-sequence enumeration oracle") {
  Rng rng(91);
  const RoadNetwork net = random_connected_graph(20, 60, rng);
  const DistanceMatrix dm = DistanceMatrix::floyd_warshall(net);
  const auto oracle = oracle_distances(net);
  for (int k = 0; k < 100; ++k) {
    const int o = static_cast<int>(rng.uniform_index(20));
    int d = static_cast<int>(rng.uniform_index(20));
    if (d == o) d = (d + 1) % 20;
    const int i = static_cast<int>(rng.uniform_index(20));
    int j = static_cast<int>(rng.uniform_index(20));
    if (j == i) j = (j + 1) % 20;
    const double expect =
        std::min(oracle[o][i] + oracle[i][j] + oracle[j][d],
                 oracle[o][i] + oracle[i][d] + oracle[d][j]);
    CHECK(pooled_distance(o, d, i, j, dm) == expect);
  }
}

TEST_CASE("attractiveness of the identical trip equals its rate") {
  const RoadNetwork net = line_graph(4);
  const DistanceMatrix dm = DistanceMatrix::floyd_warshall(net);
  const DemandTable table = single_entry_table(0, 3, 6.0);
  const TripQuery q{0, 3, 10.0};
  CHECK(attractiveness(q, 0, table, dm) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("attractiveness with no demand is zero") {
  const RoadNetwork net = line_graph(4);
  const DistanceMatrix dm = DistanceMatrix::floyd_warshall(net);
  const DemandTable table = DemandTable::from_rows({});
  CHECK(attractiveness({0, 3, 0.0}, 1, table, dm) == 0.0);
}

TEST_CASE("attractiveness hand case on a three-node line") {
  const RoadNetwork net = line_graph(3);
  const DistanceMatrix dm = DistanceMatrix::floyd_warshall(net);
  const DemandTable table = single_entry_table(1, 2, 4.0);
  const TripQuery q{0, 2, 100.0};

  // Straight-line recomputation of the same formula as an independent check.
  const double direct = 2.0, leg = 1.0;
  const double pooled = std::min(1.0 + 1.0 + 0.0, 1.0 + 1.0 + 0.0);
  const double expected = 4.0 * (direct + leg) / (2.0 * pooled);
  CHECK(expected == 3.0);
  CHECK(attractiveness(q, 1, table, dm) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("pooling-efficiency ratio stays in (0,1] over random tuples") {
  Rng rng(515);
  const RoadNetwork net = random_connected_graph(15, 40, rng);
  const DistanceMatrix dm = DistanceMatrix::floyd_warshall(net);
  AttractivenessAudit audit;
  for (int k = 0; k < 200; ++k) {
    const int o = static_cast<int>(rng.uniform_index(15));
    int d = static_cast<int>(rng.uniform_index(15));
    if (d == o) d = (d + 1) % 15;
    const int i = static_cast<int>(rng.uniform_index(15));
    int j = static_cast<int>(rng.uniform_index(15));
    if (j == i) j = (j + 1) % 15;
    const DemandTable table = single_entry_table(i, j, 1.0);
    attractiveness({o, d, 1.0}, i, table, dm, &audit);
  }
  CHECK(audit.ratio_violations == 0);
}

TEST_CASE("attractiveness is monotone in each rate entry") {
  const RoadNetwork net = RoadNetwork::grid(3, 3, 100.0);
  const DistanceMatrix dm = DistanceMatrix::floyd_warshall(net);
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<DemandRow> rows;
    for (int e = 0; e < 5; ++e) {
      const int o = static_cast<int>(rng.uniform_index(9));
      int d = static_cast<int>(rng.uniform_index(9));
      if (d == o) d = (d + 1) % 9;
      rows.push_back({0.0, 3600.0, o, d, rng.uniform(0.5, 5.0)});
    }
    const DemandTable base = DemandTable::from_rows(rows);
    rows[0].rate_per_hour += 2.0;
    const DemandTable bumped = DemandTable::from_rows(rows);
    const TripQuery q{0, 8, 1.0};
    CHECK(attractiveness(q, rows[0].origin, bumped, dm) >=
          attractiveness(q, rows[0].origin, base, dm));
  }
}

TEST_CASE("demand heading against the trip is less attractive on a directed ring") {
  std::vector<Arc> arcs;
  const int n = 8;
  for (int i = 0; i < n; ++i) arcs.push_back({i, (i + 1) % n, 1.0});
  const RoadNetwork net = RoadNetwork::from_records(arcs);
  const DistanceMatrix dm = DistanceMatrix::floyd_warshall(net);

  const TripQuery q{0, 3, 1.0};
  const DemandTable along = single_entry_table(1, 2, 5.0);    // continues with the trip
  const DemandTable against = single_entry_table(1, 0, 5.0);  // forces a wrap-around
  CHECK(attractiveness(q, 1, against, dm) < attractiveness(q, 1, along, dm));
}

TEST_CASE("sampling from an all-zero table yields nothing") {
  const DemandTable table = DemandTable::from_rows({{0.0, 100.0, 0, 1, 0.0}});
  Rng rng(5);
  CHECK(sample_arrivals(table, 0.0, 1.0, rng).empty());
}

TEST_CASE("poisson sampling concentrates near its mean") {
  // 3600/h at dt = 1 s means one expected request per tick.
  const DemandTable table = DemandTable::from_rows({{0.0, 10000.0, 0, 1, 3600.0}});
  Rng rng(12345);
  long long total = 0;
  for (int tick = 0; tick < 10000; ++tick) {
    const auto arrivals = sample_arrivals(table, static_cast<double>(tick), 1.0, rng);
    total += static_cast<long long>(arrivals.size());
    for (const ArrivalRequest& a : arrivals) {
      CHECK(a.origin == 0);
      CHECK(a.dest == 1);
    }
  }
  // mean 10000, sigma 100: allow 3 sigma
  CHECK(std::llabs(total - 10000) <= 300);
}

TEST_CASE("sampling is deterministic for a fixed seed") {
  const DemandTable table = DemandTable::from_rows(
      {{0.0, 600.0, 0, 1, 120.0}, {0.0, 600.0, 2, 3, 60.0}, {0.0, 600.0, 1, 0, 30.0}});
  Rng rng_a(777), rng_b(777);
  for (int tick = 0; tick < 600; ++tick) {
    const auto a = sample_arrivals(table, static_cast<double>(tick), 1.0, rng_a);
    const auto b = sample_arrivals(table, static_cast<double>(tick), 1.0, rng_b);
    REQUIRE(a.size() == b.size());
    for (size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].origin == b[k].origin);
      CHECK(a[k].dest == b[k].dest);
      CHECK(a[k].issue_ms == b[k].issue_ms);
    }
  }
}

TEST_CASE("arrival stamps stay inside the sampling window") {
  const DemandTable table = single_entry_table(0, 1, 7200.0);
  Rng rng(3);
  for (int tick = 0; tick < 100; ++tick) {
    const double t = static_cast<double>(tick);
    for (const ArrivalRequest& a : sample_arrivals(table, t, 1.0, rng)) {
      CHECK(a.issue_ms >= static_cast<int64_t>(t * 1000));
      CHECK(a.issue_ms < static_cast<int64_t>((t + 1.0) * 1000));
    }
  }
}

TEST_CASE("windows outside any bin are rejected") {
  const DemandTable table = single_entry_table(0, 1, 10.0);  // covers [0, 3600)
  Rng rng(1);
  try {
    sample_arrivals(table, 3600.0, 1.0, rng);
    FAIL("uncovered window accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bin_not_covered);
  }
}

TEST_CASE("bin boundaries belong to the later bin") {
  const DemandTable table = DemandTable::from_rows(
      {{0.0, 100.0, 0, 1, 1.0}, {100.0, 200.0, 0, 1, 2.0}});
  CHECK(table.bin_index_at(0.0) == 0);
  CHECK(table.bin_index_at(99.999) == 0);
  CHECK(table.bin_index_at(100.0) == 1);
  CHECK(table.bin_index_at(200.0) == -1);
}

TEST_CASE("demand table validation") {
  CHECK_THROWS_AS(DemandTable::from_rows({{0.0, 100.0, 2, 2, 1.0}}), Error);     // self pair
  CHECK_THROWS_AS(DemandTable::from_rows({{0.0, 100.0, 0, 1, -1.0}}), Error);    // negative rate
  CHECK_THROWS_AS(DemandTable::from_rows({{100.0, 100.0, 0, 1, 1.0}}), Error);   // empty bin
  CHECK_THROWS_AS(DemandTable::from_rows({{0.0, 100.0, 0, 1, 1.0},
                                          {150.0, 200.0, 0, 1, 1.0}}),
                  Error);  // gap between bins
}

TEST_CASE("demand file parsing, round-trip and scaling") {
  std::istringstream bad("bin_start_s,bin_end_s,origin,dest,rate_per_hour\n0,100,0,oops,1\n");
  try {
    parse_demand(bad, "demand.csv");
    FAIL("malformed row accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("demand.csv:2") != std::string::npos);
  }

  const DemandTable table = DemandTable::from_rows(
      {{0.0, 600.0, 0, 5, 12.5}, {600.0, 1200.0, 3, 4, 7.25}, {0.0, 600.0, 1, 2, 3.0}});
  const std::string path = "roundtrip_demand.csv";
  save_demand(table, path);
  const DemandTable back = load_demand(path);
  REQUIRE(back.bins().size() == table.bins().size());
  for (size_t b = 0; b < back.bins().size(); ++b) {
    REQUIRE(back.bins()[b].entries.size() == table.bins()[b].entries.size());
    for (size_t e = 0; e < back.bins()[b].entries.size(); ++e)
      CHECK(back.bins()[b].entries[e].rate_per_hour ==
            table.bins()[b].entries[e].rate_per_hour);
  }
  std::remove(path.c_str());

  const DemandTable doubled = table.scaled(2.0);
  CHECK(doubled.bins()[0].entries[0].rate_per_hour ==
        2.0 * table.bins()[0].entries[0].rate_per_hour);
}

TEST_CASE("corridor generator is seeded and covers its bins") {
  const auto bins = parse_bin_spec("0:3600:1,3600:7200:2");
  const DemandTable a = generate_demand_corridor(10, 10, 400.0, bins, 0.3, 20, 9);
  const DemandTable b = generate_demand_corridor(10, 10, 400.0, bins, 0.3, 20, 9);
  REQUIRE(a.bins().size() == 2);
  CHECK(a.covers(0.0, 7200.0));
  REQUIRE(a.bins()[0].entries.size() == b.bins()[0].entries.size());
  double total = 0.0;
  for (const DemandEntry& e : a.bins()[0].entries) total += e.rate_per_hour;
  CHECK(total == doctest::Approx(400.0).epsilon(1e-9));
  double total_peak = 0.0;
  for (const DemandEntry& e : a.bins()[1].entries) total_peak += e.rate_per_hour;
  CHECK(total_peak == doctest::Approx(800.0).epsilon(1e-9));
}
