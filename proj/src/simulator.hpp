#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "demand.hpp"
#include "match_model.hpp"
#include "network.hpp"
#include "planner.hpp"
#include "rng.hpp"

namespace ridepool {

enum class Policy { proposed, shortest, noshare };

std::string policy_name(Policy p);
Policy policy_from_name(const std::string& name);

struct SimulationConfig {
  double alpha = 1.2;
  double zeta = 1.0;
  double eta = 0.001;
  double wait_threshold_s = 300.0;  // T_w
  double match_window_s = 60.0;     // T_m
  int fleet_size = 100;
  double tick_s = 1.0;
  double duration_s = 10800.0;
  double willingness_prob = 1.0;
  MfdCurve mfd;
  uint64_t seed = 1;
  Policy policy = Policy::proposed;
  SolverConfig solver;
  std::string dump_instance_dir;  // empty disables instance dumps
};

enum class VehicleState {
  idle,
  to_first_pickup,
  partially_occupied,
  to_second_pickup,
  dual_occupied,
  dropping_last,
};

SupplyCategory supply_category(VehicleState state);

enum class RequestStatus { waiting, matched, picked_up, completed, cancelled };

struct Request {
  int id = -1;
  int origin = -1;
  int dest = -1;
  int64_t issue_ms = 0;
  int64_t deadline_ms = 0;  // issue + T_m
  bool willing = true;
  RequestStatus status = RequestStatus::waiting;
  int vehicle = -1;
  int64_t pickup_ms = -1;
  int64_t complete_ms = -1;
  double aboard_m = 0.0;    // realized in-vehicle distance
  double shortest_m = 0.0;  // direct shortest distance of the trip
  bool shared = false;
};

struct Leg {
  enum class End { pickup_first, pickup_second, drop };
  std::vector<int> nodes;  // nodes.front() is the leg start
  End end_event = End::drop;
  int request_id = -1;
};

struct Vehicle {
  int id = -1;
  int node = -1;
  bool mid_arc = false;
  int arc_from = -1;
  int arc_to = -1;
  double arc_len_m = 0.0;
  double arc_progress_m = 0.0;
  std::deque<Leg> itinerary;
  size_t leg_pos = 0;  // index of the node reached within the active leg
  VehicleState state = VehicleState::idle;
  int pax_a = -1;
  int pax_b = -1;
  bool a_aboard = false;
  bool b_aboard = false;
  bool drop_b_first = true;
  double odo_empty_m = 0.0;
  double odo_solo_m = 0.0;
  double odo_shared_m = 0.0;
  std::vector<int> committed_route;
  double committed_len_m = 0.0;

  int effective_node() const { return mid_arc ? arc_to : node; }
  double arc_remainder_m() const { return mid_arc ? arc_len_m - arc_progress_m : 0.0; }
  int aboard() const { return (a_aboard ? 1 : 0) + (b_aboard ? 1 : 0); }
};

enum class EventType { issue, match, pickup, dropoff, cancel, plan, interrupt, traverse };

const char* event_name(EventType t);

struct EventRow {
  int64_t time_ms = 0;
  EventType type = EventType::issue;
  int vehicle = -1;
  int request = -1;
  int node = -1;
  std::string detail;
};

void write_event_log(const std::vector<EventRow>& rows, const std::string& path);
std::vector<EventRow> parse_event_log(const std::string& path);

// Both drop orders evaluated from the match point through O_B; a sequence is
// feasible when each passenger's realized distance stays within alpha times
// their own shortest trip. Ties prefer dropping B first.
struct PooledDetourQuery {
  double a_ridden_m = 0.0;
  double approach_m = 0.0;  // vehicle -> O_B, including any current-arc remainder
  int a_dest = -1;
  int b_origin = -1;
  int b_dest = -1;
  double a_shortest_m = 0.0;
  double b_shortest_m = 0.0;
};

struct DetourDecision {
  bool feasible = false;
  bool drop_b_first = true;
  double total_m = kInf;
  double a_realized_m = kInf;
  double b_realized_m = kInf;
};

DetourDecision detour_feasible(const PooledDetourQuery& q, const DistanceMatrix& dm, double alpha);

struct PlanAudit {
  int vehicle = -1;
  int request = -1;
  double planned_m = 0.0;
  double shortest_m = 0.0;
  double linear_objective = 0.0;
  double exact_objective = 0.0;
  bool certified = true;
};

struct PooledTripAudit {
  int request = -1;
  double realized_m = 0.0;
  double shortest_m = 0.0;
};

// Fixed-timestep fleet simulation: per tick it refreshes the space-mean
// speed, samples arrivals, matches the waiting pool oldest-first, advances
// vehicles, and expires stale requests. Deterministic for a given seed.
class Simulation {
public:
  Simulation(const RoadNetwork& net, const DistanceMatrix& dm, const DemandTable& demand,
             const SimulationConfig& config);

  void step();
  void run();
  bool finished() const { return now_ms_ >= duration_ms_; }

  // Scripted-scenario hooks: queue a request at the current time, or pin an
  // idle vehicle to a node before it has moved.
  int inject_request(int origin, int dest, bool willing = true);
  void place_vehicle(int vehicle_id, int node);
  double time_s() const { return static_cast<double>(now_ms_) / 1000.0; }
  double current_speed_ms() const { return speed_ms_; }
  double match_radius_m() const { return radius_m_; }

  const std::vector<Request>& requests() const { return requests_; }
  const std::vector<Vehicle>& vehicles() const { return vehicles_; }
  const std::vector<EventRow>& events() const { return events_; }
  const std::vector<PlanAudit>& plan_audits() const { return plan_audits_; }
  const std::vector<PooledTripAudit>& pooled_audits() const { return pooled_audits_; }
  const SimulationConfig& config() const { return config_; }
  const RoadNetwork& network() const { return net_; }

  FleetSnapshot snapshot(int exclude_vehicle = -1) const;
  EdgeProbabilityField probability_field(const TripQuery& query) const;

  const AttractivenessAudit& attractiveness_audit() const { return attr_audit_; }

private:
  void place_fleet();
  void sample_new_requests(double t_s, double dt_s);
  void match_requests();
  void assign_idle(Vehicle& v, Request& r, double dist_m);
  void assign_second(Vehicle& v, Request& r, const DetourDecision& decision, double dist_m);
  void advance_vehicle(Vehicle& v, double budget_m);
  bool complete_leg(Vehicle& v);
  void do_pickup_first(Vehicle& v, Request& r);
  void do_pickup_second(Vehicle& v, Request& r);
  void do_drop(Vehicle& v, Request& r);
  void credit_distance(Vehicle& v, double meters);
  void log(EventType type, int64_t time_ms, int vehicle, int request, int node,
           std::string detail = {});
  void flush_partial_arcs();
  void check_invariants() const;
  std::vector<int> shortest_nodes(int from, int to) const;

  const RoadNetwork& net_;
  const DistanceMatrix& dm_;
  const DemandTable& demand_;
  SimulationConfig config_;

  int64_t now_ms_ = 0;
  int64_t dt_ms_ = 1000;
  int64_t duration_ms_ = 0;
  int64_t tick_end_ms_ = 0;
  double speed_ms_ = 0.0;
  double radius_m_ = 0.0;

  Rng rng_placement_;
  Rng rng_demand_;
  Rng rng_willing_;

  std::vector<Vehicle> vehicles_;
  std::vector<Request> requests_;
  std::vector<EventRow> events_;
  std::set<int> pooled_route_members_;  // vehicles whose committed route is in the shared set
  std::vector<PlanAudit> plan_audits_;
  std::vector<PooledTripAudit> pooled_audits_;
  AttractivenessAudit attr_audit_;
  long long dumped_instances_ = 0;
};

}  // namespace ridepool
