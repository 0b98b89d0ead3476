#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"

namespace ridepool {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Arc {
  int from = 0;
  int to = 0;
  double length_m = 0.0;
};

// Directed road graph with dense node ids 0..n-1, positive arc lengths,
// no self-loops and no parallel arcs.
class RoadNetwork {
public:
  static RoadNetwork from_records(const std::vector<Arc>& records);
  static RoadNetwork grid(int rows, int cols, double edge_length_m);

  int node_count() const { return node_count_; }
  int arc_count() const { return static_cast<int>(arcs_.size()); }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const Arc& arc(int arc_id) const { return arcs_[static_cast<size_t>(arc_id)]; }
  const std::vector<int>& out_arcs(int node) const { return out_arcs_[static_cast<size_t>(node)]; }
  const std::vector<int>& in_arcs(int node) const { return in_arcs_[static_cast<size_t>(node)]; }

  // -1 when the ordered pair has no arc.
  int find_arc(int from, int to) const;
  double arc_length(int from, int to) const;

private:
  int node_count_ = 0;
  std::vector<Arc> arcs_;  // sorted by (from, to)
  std::vector<std::vector<int>> out_arcs_;
  std::vector<std::vector<int>> in_arcs_;
};

RoadNetwork parse_network(std::istream& in, const std::string& source_name);
RoadNetwork load_network(const std::string& path);
void save_network(const RoadNetwork& net, const std::string& path);

// All-pairs shortest distances with a next-hop table for path reconstruction.
class DistanceMatrix {
public:
  static DistanceMatrix floyd_warshall(const RoadNetwork& net);

  int size() const { return n_; }
  double dist(int from, int to) const { return dist_[index(from, to)]; }

  // Empty when `to` is unreachable from `from`; {from} when from == to.
  std::vector<int> reconstruct_path(int from, int to) const;

private:
  size_t index(int a, int b) const { return static_cast<size_t>(a) * n_ + b; }
  int n_ = 0;
  std::vector<double> dist_;
  std::vector<int> next_;
};

// Linear speed-accumulation relation with a positive floor.
struct MfdCurve {
  double v_free_ms = 10.0;
  double n_jam = 1000.0;
  double v_floor_fraction = 0.05;
};

double mfd_speed(const MfdCurve& curve, double accumulation);
double edge_travel_time(double length_m, double speed_ms);

}  // namespace ridepool
