#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "network.hpp"
#include "rng.hpp"

namespace ridepool {

struct DemandEntry {
  int origin = 0;
  int dest = 0;
  double rate_per_hour = 0.0;
};

struct DemandBin {
  double start_s = 0.0;
  double end_s = 0.0;
  std::vector<DemandEntry> entries;  // sorted by (origin, dest), strictly positive rates
};

struct DemandRow {
  double bin_start_s = 0.0;
  double bin_end_s = 0.0;
  int origin = 0;
  int dest = 0;
  double rate_per_hour = 0.0;
};

// Time-binned OD arrival rates. Bins are contiguous, left-closed right-open;
// a timestamp on a boundary belongs to the later bin.
class DemandTable {
public:
  static DemandTable from_rows(const std::vector<DemandRow>& rows);

  const std::vector<DemandBin>& bins() const { return bins_; }
  int bin_index_at(double t_s) const;                 // -1 when uncovered
  const DemandBin* bin_at(double t_s) const;          // nullptr when uncovered
  double horizon_start_s() const { return bins_.empty() ? 0.0 : bins_.front().start_s; }
  double horizon_end_s() const { return bins_.empty() ? 0.0 : bins_.back().end_s; }
  bool covers(double start_s, double end_s) const;
  int max_node_id() const { return max_node_id_; }

  // Entries with the given origin inside one bin.
  std::pair<const DemandEntry*, const DemandEntry*> entries_from(int bin_index, int origin) const;

  DemandTable scaled(double factor) const;

private:
  std::vector<DemandBin> bins_;
  int max_node_id_ = -1;
};

DemandTable parse_demand(std::istream& in, const std::string& source_name);
DemandTable load_demand(const std::string& path);
void save_demand(const DemandTable& table, const std::string& path);

struct TripQuery {
  int origin = 0;
  int dest = 0;
  double time_s = 0.0;
};

// Minimal combined distance when the trip (O,D) pools a passenger going i->j,
// over the orderings O->i->j->D and O->i->D->j.
double pooled_distance(int origin, int dest, int i, int j, const DistanceMatrix& dm);

struct AttractivenessAudit {
  long long skipped_terms = 0;     // terms dropped for unreachable legs or zero pooled distance
  long long ratio_violations = 0;  // pooling-efficiency ratio observed above 1
};

// Demand rate at node i discounted by pooling efficiency against the query trip.
// Units follow the table (requests/hour). Terms with unreachable legs contribute 0.
double attractiveness(const TripQuery& query, int i, const DemandTable& table,
                      const DistanceMatrix& dm, AttractivenessAudit* audit = nullptr);

struct ArrivalRequest {
  int origin = 0;
  int dest = 0;
  int64_t issue_ms = 0;
};

// Poisson draws per OD pair over [t, t+dt); issue stamps are uniform in the
// window, quantized to milliseconds. The window must lie within one bin.
std::vector<ArrivalRequest> sample_arrivals(const DemandTable& table, double t_s, double dt_s,
                                            Rng& rng);

struct DemandBinSpec {
  double start_s = 0.0;
  double end_s = 0.0;
  double multiplier = 1.0;
};

// Eastbound corridor flows across the middle rows of a rows x cols grid, plus
// a uniformly random background share.
DemandTable generate_demand_corridor(int rows, int cols, double total_rate_per_hour,
                                     const std::vector<DemandBinSpec>& bins, double bg_fraction,
                                     int bg_pairs, uint64_t seed);

// Random OD pairs sharing the total rate evenly.
DemandTable generate_demand_uniform(int node_count, double total_rate_per_hour,
                                    const std::vector<DemandBinSpec>& bins, int pairs,
                                    uint64_t seed);

// Random OD pairs with independent uniform rates in [rate_lo, rate_hi]; one bin.
DemandTable generate_demand_random_pairs(int node_count, int pairs, double rate_lo,
                                         double rate_hi, double start_s, double end_s,
                                         uint64_t seed);

std::vector<DemandBinSpec> parse_bin_spec(const std::string& spec);

}  // namespace ridepool
