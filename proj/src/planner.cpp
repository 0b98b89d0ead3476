#include "planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>

#include "util.hpp"

namespace ridepool {

SubgraphSelection budget_reachable_subgraph(const RoadNetwork& net, const DistanceMatrix& dm,
                                            int origin, int dest, double budget_m) {
  if (origin < 0 || origin >= net.node_count() || dest < 0 || dest >= net.node_count())
    fail(Errc::invalid_argument, "origin/dest out of range");
  SubgraphSelection sub;
  for (int i = 0; i < net.node_count(); ++i) {
    const double through = dm.dist(origin, i) + dm.dist(i, dest);
    if (through <= budget_m + kBudgetTolM) sub.nodes.push_back(i);
  }
  for (int id = 0; id < net.arc_count(); ++id) {
    const Arc& a = net.arc(id);
    const double through = dm.dist(origin, a.from) + a.length_m + dm.dist(a.to, dest);
    if (through <= budget_m + kBudgetTolM) sub.arc_ids.push_back(id);
  }
  return sub;
}

PlanInstance make_plan_instance(const EdgeProbabilityField& field, const RoadNetwork& net) {
  PlanInstance inst;
  inst.origin = field.query.origin;
  inst.dest = field.query.dest;
  inst.budget_m = field.budget_m;
  inst.arcs.reserve(field.rows.size());
  for (const FieldRow& r : field.rows)
    inst.arcs.push_back({r.from, r.to, net.arc_length(r.from, r.to), r.pickup_probability});
  return inst;
}

bool better_plan(double obj_a, double len_a, const std::vector<int>& nodes_a, double obj_b,
                 double len_b, const std::vector<int>& nodes_b) {
  if (obj_a != obj_b) return obj_a > obj_b;
  if (len_a != len_b) return len_a < len_b;
  return nodes_a < nodes_b;
}

namespace {

struct CompactArc {
  int to = 0;
  double length = 0.0;
  double prize = 0.0;
};

// Instance remapped to dense indices; the remap is sorted by original id so
// lexicographic comparisons agree between index space and id space.
struct CompactGraph {
  std::vector<int> ids;  // index -> original id, ascending
  int origin = -1;
  int dest = -1;
  double budget = 0.0;
  double min_arc_len = kInf;
  std::vector<std::vector<CompactArc>> out;  // sorted by `to`
  std::vector<std::vector<CompactArc>> in;
};

CompactGraph compact(const PlanInstance& inst) {
  if (inst.origin == inst.dest) fail(Errc::invalid_argument, "origin equals destination");
  if (inst.arcs.empty()) fail(Errc::invalid_argument, "instance has no arcs");
  if (!std::isfinite(inst.budget_m) || !(inst.budget_m > 0.0))
    fail(Errc::invalid_argument, "budget must be positive and finite");

  CompactGraph g;
  g.budget = inst.budget_m;
  g.ids.reserve(inst.arcs.size() * 2 + 2);
  g.ids.push_back(inst.origin);
  g.ids.push_back(inst.dest);
  for (const PrizedArc& a : inst.arcs) {
    if (a.from == a.to) fail(Errc::self_loop, "instance arc is a self-loop");
    if (!(a.length_m > 0.0) || !std::isfinite(a.length_m))
      fail(Errc::nonpositive_length, "instance arc has non-positive length");
    if (!(a.prize >= 0.0) || a.prize >= 1.0)
      fail(Errc::invalid_argument, "arc prize must lie in [0,1)");
    g.ids.push_back(a.from);
    g.ids.push_back(a.to);
  }
  std::sort(g.ids.begin(), g.ids.end());
  g.ids.erase(std::unique(g.ids.begin(), g.ids.end()), g.ids.end());

  auto index_of = [&g](int id) {
    return static_cast<int>(std::lower_bound(g.ids.begin(), g.ids.end(), id) - g.ids.begin());
  };
  g.origin = index_of(inst.origin);
  g.dest = index_of(inst.dest);
  const size_t n = g.ids.size();
  g.out.resize(n);
  g.in.resize(n);
  for (const PrizedArc& a : inst.arcs) {
    const int u = index_of(a.from);
    const int v = index_of(a.to);
    g.out[static_cast<size_t>(u)].push_back({v, a.length_m, a.prize});
    g.in[static_cast<size_t>(v)].push_back({u, a.length_m, a.prize});
    g.min_arc_len = std::min(g.min_arc_len, a.length_m);
  }
  for (size_t u = 0; u < n; ++u) {
    auto by_to = [](const CompactArc& x, const CompactArc& y) { return x.to < y.to; };
    std::sort(g.out[u].begin(), g.out[u].end(), by_to);
    std::sort(g.in[u].begin(), g.in[u].end(), by_to);
    for (size_t k = 1; k < g.out[u].size(); ++k)
      if (g.out[u][k].to == g.out[u][k - 1].to)
        fail(Errc::duplicate_arc, "instance has a duplicate arc");
  }
  return g;
}

// Shortest distance from every node to dest over instance arcs.
std::vector<double> dist_to_dest(const CompactGraph& g) {
  const size_t n = g.ids.size();
  std::vector<double> dist(n, kInf);
  dist[static_cast<size_t>(g.dest)] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  heap.push({0.0, g.dest});
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[static_cast<size_t>(u)]) continue;
    for (const CompactArc& a : g.in[static_cast<size_t>(u)]) {
      const double nd = d + a.length;
      if (nd < dist[static_cast<size_t>(a.to)]) {
        dist[static_cast<size_t>(a.to)] = nd;
        heap.push({nd, a.to});
      }
    }
  }
  return dist;
}

// Greedy walk along arcs that realize the shortest distance; smallest next
// index on ties, so the seed path is deterministic.
std::vector<int> greedy_shortest_path(const CompactGraph& g, const std::vector<double>& to_dest) {
  std::vector<int> path{g.origin};
  int u = g.origin;
  while (u != g.dest) {
    int next = -1;
    for (const CompactArc& a : g.out[static_cast<size_t>(u)]) {
      if (to_dest[static_cast<size_t>(u)] == a.length + to_dest[static_cast<size_t>(a.to)]) {
        next = a.to;
        break;
      }
    }
    if (next < 0) fail(Errc::internal, "shortest-path walk failed");
    path.push_back(next);
    u = next;
  }
  return path;
}

double path_prize(const CompactGraph& g, const std::vector<int>& path) {
  double total = 0.0;
  for (size_t k = 0; k + 1 < path.size(); ++k) {
    for (const CompactArc& a : g.out[static_cast<size_t>(path[k])])
      if (a.to == path[k + 1]) {
        total += a.prize;
        break;
      }
  }
  return total;
}

double path_length(const CompactGraph& g, const std::vector<int>& path) {
  double total = 0.0;
  for (size_t k = 0; k + 1 < path.size(); ++k) {
    for (const CompactArc& a : g.out[static_cast<size_t>(path[k])])
      if (a.to == path[k + 1]) {
        total += a.length;
        break;
      }
  }
  return total;
}

// Budget-level relaxation: dp[u][lvl] bounds the prize of any walk u->dest
// whose arc-level costs floor(len/delta) sum to at most lvl. Elementarity is
// relaxed, so this is a valid upper bound for completions of partial paths.
struct LevelBound {
  bool enabled = false;
  double delta = 1.0;
  int levels = 0;
  std::vector<double> dp;  // node * levels + lvl

  double at(int node, double resid_budget) const {
    if (resid_budget < 0.0) return -kInf;
    int lvl = static_cast<int>(std::floor(resid_budget / delta));
    if (lvl >= levels) lvl = levels - 1;
    return dp[static_cast<size_t>(node) * levels + lvl];
  }
};

LevelBound build_level_bound(const CompactGraph& g) {
  constexpr int kMaxLevels = 4096;
  LevelBound lb;
  if (!(g.min_arc_len > 0.0) || !std::isfinite(g.min_arc_len)) return lb;
  const double raw_levels = g.budget / g.min_arc_len;
  if (!(raw_levels >= 0.0) || raw_levels > static_cast<double>(kMaxLevels - 2)) return lb;

  lb.enabled = true;
  lb.delta = g.min_arc_len;
  lb.levels = static_cast<int>(std::floor(raw_levels)) + 1;
  const size_t n = g.ids.size();
  lb.dp.assign(n * static_cast<size_t>(lb.levels), -kInf);
  for (int lvl = 0; lvl < lb.levels; ++lvl) {
    for (size_t u = 0; u < n; ++u) {
      double best = (static_cast<int>(u) == g.dest) ? 0.0 : -kInf;
      for (const CompactArc& a : g.out[u]) {
        const int cost = static_cast<int>(std::floor(a.length / lb.delta));
        if (cost > lvl) continue;
        const double tail = lb.dp[static_cast<size_t>(a.to) * lb.levels + (lvl - cost)];
        if (tail == -kInf) continue;
        best = std::max(best, a.prize + tail);
      }
      lb.dp[u * static_cast<size_t>(lb.levels) + lvl] = best;
    }
  }
  return lb;
}

struct Search {
  const CompactGraph& g;
  const std::vector<double>& to_dest;
  const LevelBound& level_bound;
  SolverConfig cfg;
  std::chrono::steady_clock::time_point started;

  std::vector<char> visited;
  std::vector<int> path;
  double length = 0.0;
  double prize = 0.0;

  std::vector<int> inc_nodes;
  double inc_obj = -kInf;
  double inc_len = kInf;

  long long expansions = 0;
  bool capped = false;

  Search(const CompactGraph& graph, const std::vector<double>& dists, const LevelBound& lb,
         const SolverConfig& config)
      : g(graph), to_dest(dists), level_bound(lb), cfg(config),
        started(std::chrono::steady_clock::now()), visited(graph.ids.size(), 0) {}

  // Prize still collectible from `node` with the given partial length.
  // `node` is not yet marked visited when this runs.
  double bound_from(int node, double partial_len, double partial_prize) const {
    const double resid = g.budget - partial_len;
    if (level_bound.enabled) {
      const double b = level_bound.at(node, resid);
      return b == -kInf ? -kInf : partial_prize + b;
    }
    // Fallback: each still-enterable node contributes at most the best
    // admissible prize among its incoming arcs. In the in-list, `to` holds
    // the arc source.
    double total = partial_prize;
    for (size_t v = 0; v < g.ids.size(); ++v) {
      if (visited[v] || static_cast<int>(v) == node) continue;
      double best = 0.0;
      for (const CompactArc& rev : g.in[v]) {
        const int src = rev.to;
        if (visited[static_cast<size_t>(src)] && src != node) continue;
        if (rev.length + to_dest[v] > resid + kBudgetTolM) continue;
        best = std::max(best, rev.prize);
      }
      total += best;
    }
    return total;
  }

  bool hit_cap() {
    ++expansions;
    if (expansions > cfg.max_expansions) return true;
    if (cfg.time_limit_s > 0.0 && (expansions & 1023) == 0) {
      const auto elapsed = std::chrono::steady_clock::now() - started;
      if (std::chrono::duration<double>(elapsed).count() > cfg.time_limit_s) return true;
    }
    return false;
  }

  // True when every completion of the current prefix is lexicographically
  // larger than the incumbent.
  bool prefix_hopeless(int next_node) const {
    const size_t plen = path.size();
    for (size_t k = 0; k < plen + 1 && k < inc_nodes.size(); ++k) {
      const int mine = k < plen ? path[k] : next_node;
      if (mine < inc_nodes[k]) return false;
      if (mine > inc_nodes[k]) return true;
    }
    return false;
  }

  void offer_candidate(double obj, double len, const std::vector<int>& nodes) {
    if (better_plan(obj, len, nodes, inc_obj, inc_len, inc_nodes)) {
      inc_obj = obj;
      inc_len = len;
      inc_nodes = nodes;
    }
  }

  void dfs(int u) {
    if (capped) return;
    if (hit_cap()) {
      capped = true;
      return;
    }
    for (const CompactArc& a : g.out[static_cast<size_t>(u)]) {
      if (a.to == g.dest) {
        const double len = length + a.length;
        if (len > g.budget + kBudgetTolM) continue;
        const double obj = prize + a.prize;
        if (obj < inc_obj) continue;
        std::vector<int> candidate = path;
        candidate.push_back(g.dest);
        offer_candidate(obj, len, candidate);
        continue;
      }
      if (visited[static_cast<size_t>(a.to)]) continue;
      const double new_len = length + a.length;
      if (new_len + to_dest[static_cast<size_t>(a.to)] > g.budget + kBudgetTolM) continue;

      const double bound = bound_from(a.to, new_len, prize + a.prize);
      if (bound == -kInf) continue;
      if (bound < inc_obj - 1e-9) continue;
      if (bound <= inc_obj) {
        const double min_len = new_len + to_dest[static_cast<size_t>(a.to)];
        if (min_len > inc_len) continue;
        if (min_len == inc_len && prefix_hopeless(a.to)) continue;
      }

      visited[static_cast<size_t>(a.to)] = 1;
      path.push_back(a.to);
      const double saved_len = length;
      const double saved_prize = prize;
      length = new_len;
      prize += a.prize;
      dfs(a.to);
      length = saved_len;
      prize = saved_prize;
      path.pop_back();
      visited[static_cast<size_t>(a.to)] = 0;
      if (capped) return;
    }
  }
};

PlannedPath finish(const CompactGraph& g, const std::vector<int>& compact_nodes, bool certified,
                   long long expansions) {
  PlannedPath out;
  out.nodes.reserve(compact_nodes.size());
  for (int idx : compact_nodes) out.nodes.push_back(g.ids[static_cast<size_t>(idx)]);
  out.length_m = path_length(g, compact_nodes);
  out.linear_objective = path_prize(g, compact_nodes);
  double miss = 1.0;
  for (size_t k = 0; k + 1 < compact_nodes.size(); ++k)
    for (const CompactArc& a : g.out[static_cast<size_t>(compact_nodes[k])])
      if (a.to == compact_nodes[k + 1]) {
        miss *= 1.0 - a.prize;
        break;
      }
  out.exact_objective = 1.0 - miss;
  out.certified = certified;
  out.expansions = expansions;
  return out;
}

}  // namespace

PlannedPath plan_route(const PlanInstance& inst, const SolverConfig& config) {
  const CompactGraph g = compact(inst);
  const std::vector<double> to_dest = dist_to_dest(g);
  if (to_dest[static_cast<size_t>(g.origin)] == kInf)
    fail(Errc::unreachable, "destination unreachable from origin");
  if (to_dest[static_cast<size_t>(g.origin)] > g.budget + kBudgetTolM)
    fail(Errc::unreachable, "no path fits within the budget");

  const LevelBound lb = build_level_bound(g);
  Search search(g, to_dest, lb, config);

  const std::vector<int> seed = greedy_shortest_path(g, to_dest);
  search.offer_candidate(path_prize(g, seed), path_length(g, seed), seed);

  search.visited[static_cast<size_t>(g.origin)] = 1;
  search.path.push_back(g.origin);
  search.dfs(g.origin);

  return finish(g, search.inc_nodes, !search.capped, search.expansions);
}

PlannedPath enumerate_optimal(const PlanInstance& inst) {
  const CompactGraph g = compact(inst);
  if (g.ids.size() > 25)
    fail(Errc::instance_too_large,
         "enumeration oracle limited to 25 nodes, instance has " + std::to_string(g.ids.size()));

  std::vector<char> visited(g.ids.size(), 0);
  std::vector<int> path{g.origin};
  std::vector<int> best_nodes;
  double best_obj = -kInf;
  double best_len = kInf;
  bool found = false;

  // Plain exhaustive depth-first enumeration; the only cut is the budget
  // itself, so this stays independent of the solver's machinery.
  auto explore = [&](auto&& self, int u, double length, double prize) -> void {
    for (const CompactArc& a : g.out[static_cast<size_t>(u)]) {
      const double len = length + a.length;
      if (len > g.budget + kBudgetTolM) continue;
      if (a.to == g.dest) {
        const double obj = prize + a.prize;
        std::vector<int> candidate = path;
        candidate.push_back(g.dest);
        if (!found || better_plan(obj, len, candidate, best_obj, best_len, best_nodes)) {
          best_obj = obj;
          best_len = len;
          best_nodes = candidate;
          found = true;
        }
        continue;
      }
      if (visited[static_cast<size_t>(a.to)]) continue;
      visited[static_cast<size_t>(a.to)] = 1;
      path.push_back(a.to);
      self(self, a.to, len, prize + a.prize);
      path.pop_back();
      visited[static_cast<size_t>(a.to)] = 0;
    }
  };
  visited[static_cast<size_t>(g.origin)] = 1;
  explore(explore, g.origin, 0.0, 0.0);

  if (!found) fail(Errc::unreachable, "no budget-feasible path exists");
  return finish(g, best_nodes, true, 0);
}

double exact_objective(const std::vector<int>& path_nodes, const EdgeProbabilityField& field) {
  double miss = 1.0;
  for (size_t k = 0; k + 1 < path_nodes.size(); ++k) {
    const FieldRow* row = field.find(path_nodes[k], path_nodes[k + 1]);
    if (!row)
      fail(Errc::missing_arc_prize, "field has no prize for arc (" +
                                        std::to_string(path_nodes[k]) + "," +
                                        std::to_string(path_nodes[k + 1]) + ")");
    miss *= 1.0 - row->pickup_probability;
  }
  return 1.0 - miss;
}

double linearized_objective(const std::vector<int>& path_nodes, const EdgeProbabilityField& field) {
  double total = 0.0;
  for (size_t k = 0; k + 1 < path_nodes.size(); ++k) {
    const FieldRow* row = field.find(path_nodes[k], path_nodes[k + 1]);
    if (!row)
      fail(Errc::missing_arc_prize, "field has no prize for arc (" +
                                        std::to_string(path_nodes[k]) + "," +
                                        std::to_string(path_nodes[k + 1]) + ")");
    total += row->pickup_probability;
  }
  return total;
}

PlanInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open instance file: " + path);
  std::string line;
  int line_no = 0;
  PlanInstance inst;
  long long arc_count = -1;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const std::string ctx = path + ":" + std::to_string(line_no);
    std::istringstream row{std::string(text)};
    std::string key;
    row >> key;
    if (!header_seen) {
      if (key != "ridepool-instance")
        fail(Errc::parse_error, ctx + ": expected 'ridepool-instance v1' header");
      header_seen = true;
      continue;
    }
    if (key == "origin") {
      row >> inst.origin;
    } else if (key == "dest") {
      row >> inst.dest;
    } else if (key == "budget_m") {
      row >> inst.budget_m;
    } else if (key == "arcs") {
      row >> arc_count;
      for (long long k = 0; k < arc_count; ++k) {
        if (!std::getline(in, line))
          fail(Errc::parse_error, path + ": truncated arc table");
        ++line_no;
        std::istringstream arc_row{line};
        PrizedArc a;
        if (!(arc_row >> a.from >> a.to >> a.length_m >> a.prize))
          fail(Errc::parse_error, path + ":" + std::to_string(line_no) + ": bad arc row");
        inst.arcs.push_back(a);
      }
    } else {
      fail(Errc::parse_error, ctx + ": unknown key '" + key + "'");
    }
    if (row.fail()) fail(Errc::parse_error, ctx + ": bad value");
  }
  if (!header_seen || arc_count < 0)
    fail(Errc::parse_error, path + ": incomplete instance file");
  std::sort(inst.arcs.begin(), inst.arcs.end(), [](const PrizedArc& x, const PrizedArc& y) {
    return x.from != y.from ? x.from < y.from : x.to < y.to;
  });
  return inst;
}

void save_instance(const PlanInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write instance file: " + path);
  out << "ridepool-instance v1\n";
  out << "origin " << inst.origin << '\n';
  out << "dest " << inst.dest << '\n';
  out << "budget_m " << format_exact(inst.budget_m) << '\n';
  out << "arcs " << inst.arcs.size() << '\n';
  for (const PrizedArc& a : inst.arcs)
    out << a.from << ' ' << a.to << ' ' << format_exact(a.length_m) << ' '
        << format_exact(a.prize) << '\n';
  if (!out) fail(Errc::io_error, "write failed: " + path);
}

}  // namespace ridepool
