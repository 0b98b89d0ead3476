#include "demand.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "util.hpp"

namespace ridepool {

DemandTable DemandTable::from_rows(const std::vector<DemandRow>& rows) {
  std::map<std::pair<double, double>, std::map<std::pair<int, int>, double>> grouped;
  for (const DemandRow& r : rows) {
    if (!(r.bin_start_s < r.bin_end_s))
      fail(Errc::parse_error, "demand bin must have start < end");
    if (r.origin < 0 || r.dest < 0) fail(Errc::parse_error, "negative node id in demand row");
    if (r.origin == r.dest)
      fail(Errc::parse_error, "demand entry with origin == dest (" + std::to_string(r.origin) + ")");
    if (r.rate_per_hour < 0.0 || !std::isfinite(r.rate_per_hour))
      fail(Errc::parse_error, "demand rate must be finite and non-negative");
    grouped[{r.bin_start_s, r.bin_end_s}][{r.origin, r.dest}] += r.rate_per_hour;
  }

  DemandTable table;
  for (const auto& [window, entries] : grouped) {
    DemandBin bin;
    bin.start_s = window.first;
    bin.end_s = window.second;
    for (const auto& [od, rate] : entries) {
      if (rate <= 0.0) continue;
      bin.entries.push_back({od.first, od.second, rate});
      table.max_node_id_ = std::max(table.max_node_id_, std::max(od.first, od.second));
    }
    table.bins_.push_back(std::move(bin));
  }

  for (size_t k = 1; k < table.bins_.size(); ++k) {
    if (table.bins_[k].start_s != table.bins_[k - 1].end_s)
      fail(Errc::parse_error, "demand bins must be contiguous and non-overlapping");
  }
  return table;
}

int DemandTable::bin_index_at(double t_s) const {
  for (size_t k = 0; k < bins_.size(); ++k)
    if (t_s >= bins_[k].start_s && t_s < bins_[k].end_s) return static_cast<int>(k);
  return -1;
}

const DemandBin* DemandTable::bin_at(double t_s) const {
  const int k = bin_index_at(t_s);
  return k < 0 ? nullptr : &bins_[static_cast<size_t>(k)];
}

bool DemandTable::covers(double start_s, double end_s) const {
  if (bins_.empty()) return false;
  return start_s >= horizon_start_s() && end_s <= horizon_end_s();
}

std::pair<const DemandEntry*, const DemandEntry*> DemandTable::entries_from(int bin_index,
                                                                            int origin) const {
  const auto& entries = bins_[static_cast<size_t>(bin_index)].entries;
  const DemandEntry* base = entries.data();
  size_t lo = static_cast<size_t>(
      std::lower_bound(entries.begin(), entries.end(), origin,
                       [](const DemandEntry& e, int o) { return e.origin < o; }) -
      entries.begin());
  size_t hi = lo;
  while (hi < entries.size() && entries[hi].origin == origin) ++hi;
  return {base + lo, base + hi};
}

DemandTable DemandTable::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor))
    fail(Errc::invalid_argument, "scale factor must be non-negative");
  DemandTable out = *this;
  for (DemandBin& bin : out.bins_)
    for (DemandEntry& e : bin.entries) e.rate_per_hour *= factor;
  return out;
}

DemandTable parse_demand(std::istream& in, const std::string& source_name) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) fail(Errc::malformed_record, source_name + ": empty file");
  ++line_no;
  const auto header = split(trim(line), ',');
  if (header.size() < 5 || trim(header[0]) != "bin_start_s" || trim(header[1]) != "bin_end_s" ||
      trim(header[2]) != "origin" || trim(header[3]) != "dest" ||
      trim(header[4]) != "rate_per_hour")
    fail(Errc::malformed_record,
         source_name + ":1: expected header 'bin_start_s,bin_end_s,origin,dest,rate_per_hour'");

  std::vector<DemandRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = trim(line);
    if (row.empty()) continue;
    const auto cols = split(row, ',');
    if (cols.size() < 5)
      fail(Errc::malformed_record, source_name + ":" + std::to_string(line_no) + ": expected 5 columns");
    const std::string ctx = source_name + ":" + std::to_string(line_no);
    DemandRow r;
    r.bin_start_s = parse_double(cols[0], ctx);
    r.bin_end_s = parse_double(cols[1], ctx);
    r.origin = static_cast<int>(parse_int(cols[2], ctx));
    r.dest = static_cast<int>(parse_int(cols[3], ctx));
    r.rate_per_hour = parse_double(cols[4], ctx);
    rows.push_back(r);
  }
  try {
    return DemandTable::from_rows(rows);
  } catch (const Error& e) {
    fail(e.code(), source_name + ": " + e.what());
  }
}

DemandTable load_demand(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open demand file: " + path);
  return parse_demand(in, path);
}

void save_demand(const DemandTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write demand file: " + path);
  out << "bin_start_s,bin_end_s,origin,dest,rate_per_hour\n";
  for (const DemandBin& bin : table.bins())
    for (const DemandEntry& e : bin.entries)
      out << format_exact(bin.start_s) << ',' << format_exact(bin.end_s) << ',' << e.origin << ','
          << e.dest << ',' << format_exact(e.rate_per_hour) << '\n';
  if (!out) fail(Errc::io_error, "write failed: " + path);
}

double pooled_distance(int origin, int dest, int i, int j, const DistanceMatrix& dm) {
  const double to_i = dm.dist(origin, i);
  const double seq_drop_second = to_i + dm.dist(i, j) + dm.dist(j, dest);
  const double seq_drop_first = to_i + dm.dist(i, dest) + dm.dist(dest, j);
  const double best = std::min(seq_drop_second, seq_drop_first);
  if (best == kInf)
    fail(Errc::unreachable, "pooled trip (" + std::to_string(origin) + "," + std::to_string(dest) +
                                ") with (" + std::to_string(i) + "," + std::to_string(j) +
                                ") has no finite itinerary");
  return best;
}

double attractiveness(const TripQuery& query, int i, const DemandTable& table,
                      const DistanceMatrix& dm, AttractivenessAudit* audit) {
  const int bin = table.bin_index_at(query.time_s);
  if (bin < 0) return 0.0;
  const double direct = dm.dist(query.origin, query.dest);
  if (direct == kInf) return 0.0;

  double total = 0.0;
  const auto [first, last] = table.entries_from(bin, i);
  for (const DemandEntry* e = first; e != last; ++e) {
    if (e->dest >= dm.size()) {
      if (audit) ++audit->skipped_terms;
      continue;
    }
    const double leg_ij = dm.dist(i, e->dest);
    const double to_i = dm.dist(query.origin, i);
    if (leg_ij == kInf || to_i == kInf) {
      if (audit) ++audit->skipped_terms;
      continue;
    }
    const double seq_drop_second = to_i + leg_ij + dm.dist(e->dest, query.dest);
    const double seq_drop_first = to_i + dm.dist(i, query.dest) + dm.dist(query.dest, e->dest);
    const double pooled = std::min(seq_drop_second, seq_drop_first);
    if (pooled == kInf || pooled <= 0.0) {
      if (audit) ++audit->skipped_terms;
      continue;
    }
    const double ratio = (direct + leg_ij) / (2.0 * pooled);
    if (audit && ratio > 1.0 + 1e-9) ++audit->ratio_violations;
    total += e->rate_per_hour * ratio;
  }
  return total;
}

std::vector<ArrivalRequest> sample_arrivals(const DemandTable& table, double t_s, double dt_s,
                                            Rng& rng) {
  if (!(dt_s > 0.0)) fail(Errc::invalid_argument, "dt must be positive");
  const int bin = table.bin_index_at(t_s);
  if (bin < 0 || t_s + dt_s > table.bins()[static_cast<size_t>(bin)].end_s + 1e-9)
    fail(Errc::bin_not_covered, "window [" + std::to_string(t_s) + "," + std::to_string(t_s + dt_s) +
                                    ") is not covered by a single demand bin");

  std::vector<ArrivalRequest> out;
  for (const DemandEntry& e : table.bins()[static_cast<size_t>(bin)].entries) {
    const double mean = e.rate_per_hour * dt_s / 3600.0;
    const long long count = rng.poisson(mean);
    for (long long k = 0; k < count; ++k) {
      const double stamp = t_s + rng.uniform01() * dt_s;
      int64_t ms = static_cast<int64_t>(std::floor(stamp * 1000.0));
      const int64_t lo = static_cast<int64_t>(std::ceil(t_s * 1000.0 - 1e-6));
      if (ms < lo) ms = lo;
      out.push_back({e.origin, e.dest, ms});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ArrivalRequest& a, const ArrivalRequest& b) {
    if (a.issue_ms != b.issue_ms) return a.issue_ms < b.issue_ms;
    if (a.origin != b.origin) return a.origin < b.origin;
    return a.dest < b.dest;
  });
  return out;
}

namespace {

DemandTable expand_bins(const std::vector<DemandBinSpec>& bins,
                        const std::vector<DemandEntry>& base_entries) {
  if (bins.empty()) fail(Errc::invalid_argument, "at least one demand bin is required");
  std::vector<DemandRow> rows;
  for (const DemandBinSpec& spec : bins)
    for (const DemandEntry& e : base_entries)
      rows.push_back({spec.start_s, spec.end_s, e.origin, e.dest, e.rate_per_hour * spec.multiplier});
  return DemandTable::from_rows(rows);
}

}  // namespace

DemandTable generate_demand_corridor(int rows, int cols, double total_rate_per_hour,
                                     const std::vector<DemandBinSpec>& bins, double bg_fraction,
                                     int bg_pairs, uint64_t seed) {
  if (rows < 2 || cols < 6) fail(Errc::invalid_argument, "corridor pattern needs rows>=2, cols>=6");
  if (!(total_rate_per_hour > 0.0)) fail(Errc::invalid_argument, "total rate must be positive");
  if (bg_fraction < 0.0 || bg_fraction > 1.0)
    fail(Errc::invalid_argument, "background fraction must lie in [0,1]");

  auto id = [cols](int r, int c) { return r * cols + c; };
  std::vector<std::pair<int, int>> corridor_pairs;
  const int band_lo = rows / 2 - 1;
  const int band_hi = rows / 2;
  const int west = cols / 3;
  const int east_start = 2 * cols / 3;
  for (int r = band_lo; r <= band_hi; ++r)
    for (int co = 0; co < west; ++co)
      for (int cd = east_start; cd < cols; ++cd) corridor_pairs.emplace_back(id(r, co), id(r, cd));

  std::vector<DemandEntry> entries;
  const double corridor_rate = total_rate_per_hour * (1.0 - bg_fraction);
  for (const auto& [o, d] : corridor_pairs)
    entries.push_back({o, d, corridor_rate / static_cast<double>(corridor_pairs.size())});

  if (bg_fraction > 0.0 && bg_pairs > 0) {
    Rng rng(seed);
    const int n = rows * cols;
    std::set<std::pair<int, int>> chosen;
    while (static_cast<int>(chosen.size()) < bg_pairs) {
      const int o = static_cast<int>(rng.uniform_index(static_cast<uint64_t>(n)));
      const int d = static_cast<int>(rng.uniform_index(static_cast<uint64_t>(n)));
      if (o != d) chosen.insert({o, d});
    }
    const double bg_rate = total_rate_per_hour * bg_fraction / static_cast<double>(bg_pairs);
    for (const auto& [o, d] : chosen) entries.push_back({o, d, bg_rate});
  }
  return expand_bins(bins, entries);
}

DemandTable generate_demand_uniform(int node_count, double total_rate_per_hour,
                                    const std::vector<DemandBinSpec>& bins, int pairs,
                                    uint64_t seed) {
  if (node_count < 2) fail(Errc::invalid_argument, "need at least two nodes");
  if (pairs < 1) fail(Errc::invalid_argument, "need at least one OD pair");
  if (!(total_rate_per_hour > 0.0)) fail(Errc::invalid_argument, "total rate must be positive");

  Rng rng(seed);
  std::set<std::pair<int, int>> chosen;
  const long long max_pairs = static_cast<long long>(node_count) * (node_count - 1);
  if (pairs > max_pairs) pairs = static_cast<int>(max_pairs);
  while (static_cast<int>(chosen.size()) < pairs) {
    const int o = static_cast<int>(rng.uniform_index(static_cast<uint64_t>(node_count)));
    const int d = static_cast<int>(rng.uniform_index(static_cast<uint64_t>(node_count)));
    if (o != d) chosen.insert({o, d});
  }
  std::vector<DemandEntry> entries;
  for (const auto& [o, d] : chosen)
    entries.push_back({o, d, total_rate_per_hour / static_cast<double>(pairs)});
  return expand_bins(bins, entries);
}

DemandTable generate_demand_random_pairs(int node_count, int pairs, double rate_lo, double rate_hi,
                                         double start_s, double end_s, uint64_t seed) {
  if (node_count < 2 || pairs < 1) fail(Errc::invalid_argument, "need >=2 nodes and >=1 pair");
  if (!(rate_lo >= 0.0) || rate_hi < rate_lo) fail(Errc::invalid_argument, "bad rate range");
  Rng rng(seed);
  std::map<std::pair<int, int>, double> chosen;
  while (static_cast<int>(chosen.size()) < pairs) {
    const int o = static_cast<int>(rng.uniform_index(static_cast<uint64_t>(node_count)));
    const int d = static_cast<int>(rng.uniform_index(static_cast<uint64_t>(node_count)));
    if (o == d) continue;
    chosen.emplace(std::make_pair(o, d), rng.uniform(rate_lo, rate_hi));
  }
  std::vector<DemandRow> rows;
  for (const auto& [od, rate] : chosen) rows.push_back({start_s, end_s, od.first, od.second, rate});
  return DemandTable::from_rows(rows);
}

std::vector<DemandBinSpec> parse_bin_spec(const std::string& spec) {
  std::vector<DemandBinSpec> out;
  for (const auto part : split(spec, ',')) {
    const auto fields = split(trim(part), ':');
    if (fields.size() != 3) fail(Errc::parse_error, "bin spec must be start:end:multiplier");
    DemandBinSpec b;
    b.start_s = parse_double(fields[0], "bin spec");
    b.end_s = parse_double(fields[1], "bin spec");
    b.multiplier = parse_double(fields[2], "bin spec");
    out.push_back(b);
  }
  return out;
}

}  // namespace ridepool
