#include "network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "util.hpp"

namespace ridepool {

RoadNetwork RoadNetwork::from_records(const std::vector<Arc>& records) {
  if (records.empty()) fail(Errc::malformed_record, "network has no arc records");

  std::vector<Arc> arcs = records;
  int max_node = -1;
  for (const Arc& a : arcs) {
    if (a.from < 0 || a.to < 0)
      fail(Errc::malformed_record, "negative node id in arc (" + std::to_string(a.from) + "," +
                                       std::to_string(a.to) + ")");
    if (a.from == a.to)
      fail(Errc::self_loop, "self-loop at node " + std::to_string(a.from));
    if (!(a.length_m > 0.0) || !std::isfinite(a.length_m))
      fail(Errc::nonpositive_length, "arc (" + std::to_string(a.from) + "," + std::to_string(a.to) +
                                         ") has non-positive length");
    max_node = std::max(max_node, std::max(a.from, a.to));
  }

  std::sort(arcs.begin(), arcs.end(), [](const Arc& x, const Arc& y) {
    return x.from != y.from ? x.from < y.from : x.to < y.to;
  });
  for (size_t i = 1; i < arcs.size(); ++i) {
    if (arcs[i].from == arcs[i - 1].from && arcs[i].to == arcs[i - 1].to)
      fail(Errc::duplicate_arc, "duplicate arc (" + std::to_string(arcs[i].from) + "," +
                                    std::to_string(arcs[i].to) + ")");
  }

  const int n = max_node + 1;
  std::vector<char> seen(static_cast<size_t>(n), 0);
  for (const Arc& a : arcs) {
    seen[static_cast<size_t>(a.from)] = 1;
    seen[static_cast<size_t>(a.to)] = 1;
  }
  for (int i = 0; i < n; ++i)
    if (!seen[static_cast<size_t>(i)])
      fail(Errc::node_gap, "node ids must be contiguous; id " + std::to_string(i) + " is unused");

  RoadNetwork net;
  net.node_count_ = n;
  net.arcs_ = std::move(arcs);
  net.out_arcs_.resize(static_cast<size_t>(n));
  net.in_arcs_.resize(static_cast<size_t>(n));
  for (int id = 0; id < static_cast<int>(net.arcs_.size()); ++id) {
    net.out_arcs_[static_cast<size_t>(net.arcs_[static_cast<size_t>(id)].from)].push_back(id);
    net.in_arcs_[static_cast<size_t>(net.arcs_[static_cast<size_t>(id)].to)].push_back(id);
  }
  return net;
}

RoadNetwork RoadNetwork::grid(int rows, int cols, double edge_length_m) {
  if (rows < 1 || cols < 1 || static_cast<long long>(rows) * cols < 2)
    fail(Errc::invalid_argument, "grid needs at least two nodes");
  if (!(edge_length_m > 0.0))
    fail(Errc::nonpositive_length, "grid edge length must be positive");

  std::vector<Arc> arcs;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) {
        arcs.push_back({id(r, c), id(r, c + 1), edge_length_m});
        arcs.push_back({id(r, c + 1), id(r, c), edge_length_m});
      }
      if (r + 1 < rows) {
        arcs.push_back({id(r, c), id(r + 1, c), edge_length_m});
        arcs.push_back({id(r + 1, c), id(r, c), edge_length_m});
      }
    }
  }
  return from_records(arcs);
}

int RoadNetwork::find_arc(int from, int to) const {
  if (from < 0 || from >= node_count_ || to < 0 || to >= node_count_) return -1;
  for (int id : out_arcs_[static_cast<size_t>(from)])
    if (arcs_[static_cast<size_t>(id)].to == to) return id;
  return -1;
}

double RoadNetwork::arc_length(int from, int to) const {
  const int id = find_arc(from, to);
  if (id < 0)
    fail(Errc::invalid_argument,
         "no arc (" + std::to_string(from) + "," + std::to_string(to) + ")");
  return arcs_[static_cast<size_t>(id)].length_m;
}

RoadNetwork parse_network(std::istream& in, const std::string& source_name) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) fail(Errc::malformed_record, source_name + ": empty file");
  ++line_no;
  const auto header = split(trim(line), ',');
  if (header.size() < 3 || trim(header[0]) != "from" || trim(header[1]) != "to" ||
      trim(header[2]) != "length_m")
    fail(Errc::malformed_record, source_name + ":1: expected header 'from,to,length_m'");

  std::vector<Arc> records;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = trim(line);
    if (row.empty()) continue;
    const auto cols = split(row, ',');
    if (cols.size() < 3)
      fail(Errc::malformed_record, source_name + ":" + std::to_string(line_no) + ": expected 3 columns");
    const std::string ctx = source_name + ":" + std::to_string(line_no);
    Arc a;
    a.from = static_cast<int>(parse_int(cols[0], ctx));
    a.to = static_cast<int>(parse_int(cols[1], ctx));
    a.length_m = parse_double(cols[2], ctx);
    records.push_back(a);
  }
  return RoadNetwork::from_records(records);
}

RoadNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open network file: " + path);
  return parse_network(in, path);
}

void save_network(const RoadNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write network file: " + path);
  out << "from,to,length_m\n";
  for (const Arc& a : net.arcs())
    out << a.from << ',' << a.to << ',' << format_exact(a.length_m) << '\n';
  if (!out) fail(Errc::io_error, "write failed: " + path);
}

DistanceMatrix DistanceMatrix::floyd_warshall(const RoadNetwork& net) {
  DistanceMatrix dm;
  const int n = net.node_count();
  dm.n_ = n;
  dm.dist_.assign(static_cast<size_t>(n) * n, kInf);
  dm.next_.assign(static_cast<size_t>(n) * n, -1);

  for (int i = 0; i < n; ++i) {
    dm.dist_[dm.index(i, i)] = 0.0;
    dm.next_[dm.index(i, i)] = i;
  }
  for (const Arc& a : net.arcs()) {
    dm.dist_[dm.index(a.from, a.to)] = a.length_m;
    dm.next_[dm.index(a.from, a.to)] = a.to;
  }

  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      const double dik = dm.dist_[dm.index(i, k)];
      if (dik == kInf) continue;
      const double* row_k = &dm.dist_[dm.index(k, 0)];
      double* row_i = &dm.dist_[dm.index(i, 0)];
      int* next_i = &dm.next_[dm.index(i, 0)];
      const int next_ik = dm.next_[dm.index(i, k)];
      for (int j = 0; j < n; ++j) {
        const double candidate = dik + row_k[j];
        if (candidate < row_i[j]) {
          row_i[j] = candidate;
          next_i[j] = next_ik;
        }
      }
    }
  }
  return dm;
}

std::vector<int> DistanceMatrix::reconstruct_path(int from, int to) const {
  if (from < 0 || from >= n_ || to < 0 || to >= n_)
    fail(Errc::invalid_argument, "node id out of range");
  if (from == to) return {from};
  if (next_[index(from, to)] < 0) return {};
  std::vector<int> path{from};
  int cur = from;
  while (cur != to) {
    cur = next_[index(cur, to)];
    path.push_back(cur);
    if (path.size() > static_cast<size_t>(n_) + 1)
      fail(Errc::internal, "next-hop table has a cycle");
  }
  return path;
}

double mfd_speed(const MfdCurve& curve, double accumulation) {
  if (accumulation < 0.0 || !std::isfinite(accumulation))
    fail(Errc::invalid_argument, "accumulation must be non-negative");
  if (!(curve.v_free_ms > 0.0) || !(curve.n_jam > 0.0) || !(curve.v_floor_fraction > 0.0) ||
      curve.v_floor_fraction > 1.0)
    fail(Errc::invalid_argument, "invalid MFD parameters");
  const double fraction = std::max(1.0 - accumulation / curve.n_jam, curve.v_floor_fraction);
  return curve.v_free_ms * fraction;
}

double edge_travel_time(double length_m, double speed_ms) {
  if (!(speed_ms > 0.0)) fail(Errc::nonpositive_speed, "speed must be positive");
  if (!(length_m > 0.0)) fail(Errc::invalid_argument, "edge length must be positive");
  return length_m / speed_ms;
}

}  // namespace ridepool
