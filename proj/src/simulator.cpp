#include "simulator.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "util.hpp"

namespace ridepool {

namespace {
constexpr double kMoveEpsM = 1e-9;
constexpr double kDetourTolM = 1e-6;

int64_t to_ms(double seconds, const char* what) {
  const double ms = seconds * 1000.0;
  const double rounded = std::round(ms);
  if (!std::isfinite(ms) || std::abs(ms - rounded) > 1e-6)
    fail(Errc::invalid_argument, std::string(what) + " must be a whole number of milliseconds");
  return static_cast<int64_t>(rounded);
}
}  // namespace

std::string policy_name(Policy p) {
  switch (p) {
    case Policy::proposed: return "proposed";
    case Policy::shortest: return "shortest";
    case Policy::noshare: return "noshare";
  }
  return "?";
}

Policy policy_from_name(const std::string& name) {
  if (name == "proposed") return Policy::proposed;
  if (name == "shortest") return Policy::shortest;
  if (name == "noshare") return Policy::noshare;
  fail(Errc::parse_error, "unknown policy '" + name + "' (expected proposed|shortest|noshare)");
}

SupplyCategory supply_category(VehicleState state) {
  switch (state) {
    case VehicleState::idle: return SupplyCategory::empty;
    case VehicleState::dropping_last: return SupplyCategory::dropping;
    case VehicleState::partially_occupied: return SupplyCategory::partial;
    default: return SupplyCategory::uncounted;
  }
}

const char* event_name(EventType t) {
  switch (t) {
    case EventType::issue: return "issue";
    case EventType::match: return "match";
    case EventType::pickup: return "pickup";
    case EventType::dropoff: return "dropoff";
    case EventType::cancel: return "cancel";
    case EventType::plan: return "plan";
    case EventType::interrupt: return "interrupt";
    case EventType::traverse: return "traverse";
  }
  return "?";
}

void write_event_log(const std::vector<EventRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write event log: " + path);
  out << "time_s,event_type,vehicle_id,request_id,node,detail\n";
  for (const EventRow& r : rows)
    out << format_ms(r.time_ms) << ',' << event_name(r.type) << ',' << r.vehicle << ','
        << r.request << ',' << r.node << ',' << r.detail << '\n';
  if (!out) fail(Errc::io_error, "write failed: " + path);
}

std::vector<EventRow> parse_event_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open event log: " + path);
  std::string line;
  if (!std::getline(in, line)) fail(Errc::malformed_record, path + ": empty event log");
  if (trim(line) != "time_s,event_type,vehicle_id,request_id,node,detail")
    fail(Errc::malformed_record, path + ":1: unexpected event log header");

  std::vector<EventRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto cols = split(text, ',');
    if (cols.size() < 6)
      fail(Errc::malformed_record, path + ":" + std::to_string(line_no) + ": expected 6 columns");
    const std::string ctx = path + ":" + std::to_string(line_no);
    EventRow r;
    const double t = parse_double(cols[0], ctx);
    r.time_ms = static_cast<int64_t>(std::llround(t * 1000.0));
    const std::string type(trim(cols[1]));
    bool known = false;
    for (EventType candidate :
         {EventType::issue, EventType::match, EventType::pickup, EventType::dropoff,
          EventType::cancel, EventType::plan, EventType::interrupt, EventType::traverse}) {
      if (type == event_name(candidate)) {
        r.type = candidate;
        known = true;
        break;
      }
    }
    if (!known) fail(Errc::malformed_record, ctx + ": unknown event type '" + type + "'");
    r.vehicle = static_cast<int>(parse_int(cols[2], ctx));
    r.request = static_cast<int>(parse_int(cols[3], ctx));
    r.node = static_cast<int>(parse_int(cols[4], ctx));
    r.detail = std::string(cols[5]);
    for (size_t k = 6; k < cols.size(); ++k) r.detail += "," + std::string(cols[k]);
    rows.push_back(std::move(r));
  }
  return rows;
}

DetourDecision detour_feasible(const PooledDetourQuery& q, const DistanceMatrix& dm,
                               double alpha) {
  if (!(alpha >= 1.0)) fail(Errc::invalid_argument, "alpha must be >= 1");
  const double ob_db = dm.dist(q.b_origin, q.b_dest);
  const double db_da = dm.dist(q.b_dest, q.a_dest);
  const double ob_da = dm.dist(q.b_origin, q.a_dest);
  const double da_db = dm.dist(q.a_dest, q.b_dest);

  DetourDecision best;

  // O_B -> D_B -> D_A (drop B first)
  if (ob_db != kInf && db_da != kInf) {
    const double a_real = q.a_ridden_m + q.approach_m + ob_db + db_da;
    const double b_real = ob_db;
    if (a_real <= alpha * q.a_shortest_m + kDetourTolM &&
        b_real <= alpha * q.b_shortest_m + kDetourTolM) {
      best.feasible = true;
      best.drop_b_first = true;
      best.total_m = q.approach_m + ob_db + db_da;
      best.a_realized_m = a_real;
      best.b_realized_m = b_real;
    }
  }

  // O_B -> D_A -> D_B (drop A first)
  if (ob_da != kInf && da_db != kInf) {
    const double a_real = q.a_ridden_m + q.approach_m + ob_da;
    const double b_real = ob_da + da_db;
    const double total = q.approach_m + ob_da + da_db;
    if (a_real <= alpha * q.a_shortest_m + kDetourTolM &&
        b_real <= alpha * q.b_shortest_m + kDetourTolM &&
        (!best.feasible || total < best.total_m)) {
      best.feasible = true;
      best.drop_b_first = false;
      best.total_m = total;
      best.a_realized_m = a_real;
      best.b_realized_m = b_real;
    }
  }
  return best;
}

Simulation::Simulation(const RoadNetwork& net, const DistanceMatrix& dm,
                       const DemandTable& demand, const SimulationConfig& config)
    : net_(net), dm_(dm), demand_(demand), config_(config),
      rng_placement_(Rng(config.seed).substream(1)),
      rng_demand_(Rng(config.seed).substream(2)),
      rng_willing_(Rng(config.seed).substream(3)) {
  if (!(config_.alpha >= 1.0)) fail(Errc::invalid_argument, "alpha must be >= 1");
  if (!(config_.zeta > 0.0) || config_.zeta > 1.0)
    fail(Errc::invalid_argument, "zeta must lie in (0,1]");
  if (!(config_.eta > 0.0)) fail(Errc::invalid_argument, "eta must be positive");
  if (config_.fleet_size < 0) fail(Errc::invalid_argument, "fleet size must be non-negative");
  if (config_.willingness_prob < 0.0 || config_.willingness_prob > 1.0)
    fail(Errc::invalid_argument, "willingness probability must lie in [0,1]");
  dt_ms_ = to_ms(config_.tick_s, "tick");
  if (dt_ms_ <= 0) fail(Errc::invalid_argument, "tick must be positive");
  duration_ms_ = to_ms(config_.duration_s, "duration");
  if (duration_ms_ < 0) fail(Errc::invalid_argument, "duration must be non-negative");
  to_ms(config_.wait_threshold_s, "wait threshold");
  to_ms(config_.match_window_s, "match window");
  if (duration_ms_ > 0 && !demand_.covers(0.0, config_.duration_s))
    fail(Errc::bin_not_covered, "demand table does not cover the simulation horizon");
  if (demand_.max_node_id() >= net_.node_count())
    fail(Errc::invalid_argument, "demand references node ids beyond the network");
  if (config_.policy == Policy::noshare) config_.willingness_prob = 0.0;
  place_fleet();
}

void Simulation::place_fleet() {
  vehicles_.resize(static_cast<size_t>(config_.fleet_size));
  for (int k = 0; k < config_.fleet_size; ++k) {
    Vehicle& v = vehicles_[static_cast<size_t>(k)];
    v.id = k;
    v.node = static_cast<int>(
        rng_placement_.uniform_index(static_cast<uint64_t>(net_.node_count())));
  }
}

void Simulation::log(EventType type, int64_t time_ms, int vehicle, int request, int node,
                     std::string detail) {
  events_.push_back({time_ms, type, vehicle, request, node, std::move(detail)});
}

int Simulation::inject_request(int origin, int dest, bool willing) {
  if (origin < 0 || origin >= net_.node_count() || dest < 0 || dest >= net_.node_count() ||
      origin == dest)
    fail(Errc::invalid_argument, "bad request endpoints");
  Request r;
  r.id = static_cast<int>(requests_.size());
  r.origin = origin;
  r.dest = dest;
  r.issue_ms = now_ms_;
  r.deadline_ms = now_ms_ + to_ms(config_.match_window_s, "match window");
  r.willing = willing && config_.policy != Policy::noshare;
  r.shortest_m = dm_.dist(origin, dest);
  requests_.push_back(r);
  log(EventType::issue, r.issue_ms, -1, r.id, r.origin,
      "dest:" + std::to_string(r.dest) + ";willing:" + (r.willing ? "1" : "0"));
  return r.id;
}

void Simulation::place_vehicle(int vehicle_id, int node) {
  if (vehicle_id < 0 || vehicle_id >= static_cast<int>(vehicles_.size()))
    fail(Errc::invalid_argument, "no such vehicle");
  if (node < 0 || node >= net_.node_count()) fail(Errc::invalid_argument, "no such node");
  Vehicle& v = vehicles_[static_cast<size_t>(vehicle_id)];
  if (v.state != VehicleState::idle || v.mid_arc)
    fail(Errc::invalid_argument, "vehicle can only be placed while idle");
  v.node = node;
}

std::vector<int> Simulation::shortest_nodes(int from, int to) const {
  std::vector<int> path = dm_.reconstruct_path(from, to);
  if (path.empty())
    fail(Errc::internal, "expected a path from " + std::to_string(from) + " to " +
                             std::to_string(to));
  return path;
}

void Simulation::sample_new_requests(double t_s, double dt_s) {
  const std::vector<ArrivalRequest> arrivals = sample_arrivals(demand_, t_s, dt_s, rng_demand_);
  for (const ArrivalRequest& a : arrivals) {
    Request r;
    r.id = static_cast<int>(requests_.size());
    r.origin = a.origin;
    r.dest = a.dest;
    r.issue_ms = a.issue_ms;
    r.deadline_ms = a.issue_ms + to_ms(config_.match_window_s, "match window");
    r.willing = rng_willing_.uniform01() < config_.willingness_prob;
    r.shortest_m = dm_.dist(a.origin, a.dest);
    requests_.push_back(r);
    log(EventType::issue, r.issue_ms, -1, r.id, r.origin,
        "dest:" + std::to_string(r.dest) + ";willing:" + (r.willing ? "1" : "0"));
  }
}

void Simulation::match_requests() {
  for (Request& r : requests_) {
    if (r.status != RequestStatus::waiting) continue;
    if (r.issue_ms >= tick_end_ms_) continue;  // not yet visible this tick
    if (r.shortest_m == kInf) continue;

    // Nearest idle vehicle within the waiting-time threshold.
    int best_idle = -1;
    double best_idle_d = kInf;
    for (const Vehicle& v : vehicles_) {
      if (v.state != VehicleState::idle) continue;
      const double d = dm_.dist(v.node, r.origin);
      if (d == kInf || d / speed_ms_ > config_.wait_threshold_s + 1e-9) continue;
      if (d < best_idle_d) {
        best_idle_d = d;
        best_idle = v.id;
      }
    }
    if (best_idle >= 0) {
      assign_idle(vehicles_[static_cast<size_t>(best_idle)], r, best_idle_d);
      continue;
    }

    if (!r.willing) continue;

    // Nearest feasible partially occupied vehicle, same reachability bound.
    int best_partial = -1;
    double best_partial_d = kInf;
    DetourDecision best_decision;
    for (const Vehicle& v : vehicles_) {
      if (v.state != VehicleState::partially_occupied) continue;
      const Request& a = requests_[static_cast<size_t>(v.pax_a)];
      if (!a.willing) continue;
      const double to_origin = dm_.dist(v.effective_node(), r.origin);
      if (to_origin == kInf) continue;
      const double d_eff = v.arc_remainder_m() + to_origin;
      if (d_eff / speed_ms_ > config_.wait_threshold_s + 1e-9) continue;
      if (d_eff >= best_partial_d) continue;
      PooledDetourQuery q;
      // Progress on the in-flight arc is credited at arc completion, so it
      // has to be counted here by hand.
      q.a_ridden_m = a.aboard_m + (v.mid_arc ? v.arc_progress_m : 0.0);
      q.approach_m = d_eff;
      q.a_dest = a.dest;
      q.b_origin = r.origin;
      q.b_dest = r.dest;
      q.a_shortest_m = a.shortest_m;
      q.b_shortest_m = r.shortest_m;
      const DetourDecision decision = detour_feasible(q, dm_, config_.alpha);
      if (!decision.feasible) continue;
      best_partial = v.id;
      best_partial_d = d_eff;
      best_decision = decision;
    }
    if (best_partial >= 0)
      assign_second(vehicles_[static_cast<size_t>(best_partial)], r, best_decision,
                    best_partial_d);
  }
}

void Simulation::assign_idle(Vehicle& v, Request& r, double dist_m) {
  r.status = RequestStatus::matched;
  r.vehicle = v.id;
  v.pax_a = r.id;
  v.state = VehicleState::to_first_pickup;
  v.itinerary.clear();
  v.leg_pos = 0;
  v.itinerary.push_back({shortest_nodes(v.node, r.origin), Leg::End::pickup_first, r.id});
  log(EventType::match, tick_end_ms_, v.id, r.id, v.node,
      "kind:idle;dist_m:" + format_exact(dist_m));
}

void Simulation::assign_second(Vehicle& v, Request& r, const DetourDecision& decision,
                               double dist_m) {
  r.status = RequestStatus::matched;
  r.vehicle = v.id;
  v.pax_b = r.id;
  v.drop_b_first = decision.drop_b_first;
  v.state = VehicleState::to_second_pickup;
  pooled_route_members_.erase(v.id);
  v.committed_route.clear();
  v.committed_len_m = 0.0;
  v.itinerary.clear();
  v.leg_pos = 0;
  v.itinerary.push_back(
      {shortest_nodes(v.effective_node(), r.origin), Leg::End::pickup_second, r.id});
  log(EventType::match, tick_end_ms_, v.id, r.id, v.effective_node(),
      "kind:pool;dist_m:" + format_exact(dist_m));
  log(EventType::interrupt, tick_end_ms_, v.id, r.id, v.effective_node(), "");
}

void Simulation::credit_distance(Vehicle& v, double meters) {
  switch (v.aboard()) {
    case 0: v.odo_empty_m += meters; break;
    case 1: v.odo_solo_m += meters; break;
    default: v.odo_shared_m += meters; break;
  }
  if (v.a_aboard) requests_[static_cast<size_t>(v.pax_a)].aboard_m += meters;
  if (v.b_aboard) requests_[static_cast<size_t>(v.pax_b)].aboard_m += meters;
}

void Simulation::advance_vehicle(Vehicle& v, double budget_m) {
  while (true) {
    if (!v.mid_arc && !v.itinerary.empty() &&
        v.leg_pos + 1 >= v.itinerary.front().nodes.size()) {
      // Leg finished (covers zero-length legs); the event consumes the tick.
      if (complete_leg(v)) return;
      continue;
    }
    if (v.itinerary.empty() && !v.mid_arc) return;
    if (budget_m <= kMoveEpsM) return;

    if (!v.mid_arc) {
      Leg& leg = v.itinerary.front();
      const int from = leg.nodes[v.leg_pos];
      const int to = leg.nodes[v.leg_pos + 1];
      v.mid_arc = true;
      v.arc_from = from;
      v.arc_to = to;
      v.arc_len_m = net_.arc_length(from, to);
      v.arc_progress_m = 0.0;
    }
    const double step = std::min(budget_m, v.arc_len_m - v.arc_progress_m);
    v.arc_progress_m += step;
    budget_m -= step;
    if (v.arc_progress_m < v.arc_len_m - kMoveEpsM) return;  // budget spent mid-arc

    v.mid_arc = false;
    v.node = v.arc_to;
    log(EventType::traverse, tick_end_ms_, v.id, -1, v.arc_to,
        "from:" + std::to_string(v.arc_from) + ";len_m:" + format_exact(v.arc_len_m));
    credit_distance(v, v.arc_len_m);
    if (!v.itinerary.empty()) {
      const Leg& leg = v.itinerary.front();
      if (v.leg_pos + 1 < leg.nodes.size() && leg.nodes[v.leg_pos + 1] == v.node) {
        ++v.leg_pos;
      } else if (leg.nodes[v.leg_pos] != v.node) {
        // An interrupt replaced the leg; the replacement starts where the
        // in-flight arc lands.
        fail(Errc::internal, "active leg does not continue from the vehicle position");
      }
    }
  }
}

bool Simulation::complete_leg(Vehicle& v) {
  const Leg leg = v.itinerary.front();
  v.itinerary.pop_front();
  v.leg_pos = 0;
  if (v.node != leg.nodes.back()) fail(Errc::internal, "leg ended away from its final node");
  Request& r = requests_[static_cast<size_t>(leg.request_id)];
  switch (leg.end_event) {
    case Leg::End::pickup_first: do_pickup_first(v, r); break;
    case Leg::End::pickup_second: do_pickup_second(v, r); break;
    case Leg::End::drop: do_drop(v, r); break;
  }
  return true;
}

void Simulation::do_pickup_first(Vehicle& v, Request& r) {
  r.status = RequestStatus::picked_up;
  r.pickup_ms = tick_end_ms_;
  v.a_aboard = true;
  v.state = VehicleState::partially_occupied;
  log(EventType::pickup, tick_end_ms_, v.id, r.id, r.origin, "aboard:1");

  std::vector<int> route;
  PlanAudit audit;
  audit.vehicle = v.id;
  audit.request = r.id;
  audit.shortest_m = r.shortest_m;
  if (config_.policy == Policy::proposed) {
    const TripQuery query{r.origin, r.dest, time_s()};
    const FleetSnapshot fleet = snapshot(v.id);
    ModelParams params{config_.zeta, config_.eta, radius_m_};
    EdgeProbabilityField field;
    try {
      field = build_probability_field(query, config_.alpha, fleet, demand_, net_, dm_, params,
                                      speed_ms_, &attr_audit_);
    } catch (const Error& e) {
      fail(Errc::internal, std::string("planning failed after a committed match: ") + e.what());
    }
    PlanInstance inst = make_plan_instance(field, net_);
    if (!config_.dump_instance_dir.empty()) {
      char name[64];
      std::snprintf(name, sizeof(name), "plan_%06lld.txt", static_cast<long long>(dumped_instances_++));
      save_instance(inst, (std::filesystem::path(config_.dump_instance_dir) / name).string());
    }
    PlannedPath plan;
    try {
      plan = plan_route(inst, config_.solver);
    } catch (const Error& e) {
      fail(Errc::internal, std::string("planning failed after a committed match: ") + e.what());
    }
    route = plan.nodes;
    audit.planned_m = plan.length_m;
    audit.linear_objective = plan.linear_objective;
    audit.exact_objective = plan.exact_objective;
    audit.certified = plan.certified;
  } else {
    route = shortest_nodes(r.origin, r.dest);
    audit.planned_m = r.shortest_m;
    audit.certified = true;
  }

  v.committed_route = route;
  v.committed_len_m = audit.planned_m;
  v.itinerary.push_back({route, Leg::End::drop, r.id});
  pooled_route_members_.insert(v.id);
  plan_audits_.push_back(audit);
  log(EventType::plan, tick_end_ms_, v.id, r.id, r.origin,
      "policy:" + policy_name(config_.policy) + ";len_m:" + format_exact(audit.planned_m) +
          ";shortest_m:" + format_exact(audit.shortest_m) +
          ";obj_linear:" + format_fixed(audit.linear_objective, 6) +
          ";obj_exact:" + format_fixed(audit.exact_objective, 6) +
          ";certified:" + (audit.certified ? "1" : "0"));
}

void Simulation::do_pickup_second(Vehicle& v, Request& r) {
  r.status = RequestStatus::picked_up;
  r.pickup_ms = tick_end_ms_;
  v.b_aboard = true;
  v.state = VehicleState::dual_occupied;
  r.shared = true;
  requests_[static_cast<size_t>(v.pax_a)].shared = true;
  log(EventType::pickup, tick_end_ms_, v.id, r.id, r.origin, "aboard:2");

  const Request& a = requests_[static_cast<size_t>(v.pax_a)];
  if (v.drop_b_first) {
    v.itinerary.push_back({shortest_nodes(r.origin, r.dest), Leg::End::drop, r.id});
    v.itinerary.push_back({shortest_nodes(r.dest, a.dest), Leg::End::drop, a.id});
  } else {
    v.itinerary.push_back({shortest_nodes(r.origin, a.dest), Leg::End::drop, a.id});
    v.itinerary.push_back({shortest_nodes(a.dest, r.dest), Leg::End::drop, r.id});
  }
}

void Simulation::do_drop(Vehicle& v, Request& r) {
  r.status = RequestStatus::completed;
  r.complete_ms = tick_end_ms_;
  if (r.id == v.pax_a) {
    v.a_aboard = false;
    v.pax_a = -1;
  } else {
    v.b_aboard = false;
    v.pax_b = -1;
  }
  log(EventType::dropoff, tick_end_ms_, v.id, r.id, v.node,
      "aboard:" + std::to_string(v.aboard()) + ";ride_m:" + format_exact(r.aboard_m));
  if (r.shared) pooled_audits_.push_back({r.id, r.aboard_m, r.shortest_m});

  if (v.aboard() == 1) {
    v.state = VehicleState::dropping_last;
    return;
  }
  if (v.state == VehicleState::partially_occupied) pooled_route_members_.erase(v.id);
  v.state = VehicleState::idle;
  v.committed_route.clear();
  v.committed_len_m = 0.0;
  v.itinerary.clear();
  v.leg_pos = 0;
  v.pax_a = -1;
  v.pax_b = -1;
}

void Simulation::step() {
  if (finished()) return;
  const int64_t dt_ms = std::min(dt_ms_, duration_ms_ - now_ms_);
  tick_end_ms_ = now_ms_ + dt_ms;
  const double dt_s = static_cast<double>(dt_ms) / 1000.0;
  const double t_s = static_cast<double>(now_ms_) / 1000.0;

  speed_ms_ = mfd_speed(config_.mfd, static_cast<double>(config_.fleet_size));
  radius_m_ = config_.wait_threshold_s * speed_ms_;

  sample_new_requests(t_s, dt_s);
  match_requests();
  for (Vehicle& v : vehicles_) advance_vehicle(v, speed_ms_ * dt_s);
  for (Request& r : requests_) {
    if (r.status == RequestStatus::waiting && r.deadline_ms < tick_end_ms_) {
      r.status = RequestStatus::cancelled;
      log(EventType::cancel, tick_end_ms_, -1, r.id, r.origin, "");
    }
  }
  check_invariants();
  now_ms_ = tick_end_ms_;
}

void Simulation::run() {
  while (!finished()) step();
  flush_partial_arcs();
}

void Simulation::flush_partial_arcs() {
  for (Vehicle& v : vehicles_) {
    if (!v.mid_arc || v.arc_progress_m <= 0.0) continue;
    log(EventType::traverse, now_ms_, v.id, -1, v.arc_to,
        "from:" + std::to_string(v.arc_from) + ";len_m:" + format_exact(v.arc_progress_m));
    credit_distance(v, v.arc_progress_m);
    v.arc_progress_m = 0.0;
  }
}

FleetSnapshot Simulation::snapshot(int exclude_vehicle) const {
  FleetSnapshot snap;
  snap.time_s = time_s();
  for (const Vehicle& v : vehicles_) {
    if (v.id == exclude_vehicle) continue;
    snap.vehicles.push_back({v.id, v.effective_node(), supply_category(v.state)});
    if (v.state == VehicleState::partially_occupied)
      snap.planned_routes.push_back({v.id, v.committed_route});
  }
  return snap;
}

EdgeProbabilityField Simulation::probability_field(const TripQuery& query) const {
  const double speed = mfd_speed(config_.mfd, static_cast<double>(config_.fleet_size));
  ModelParams params{config_.zeta, config_.eta, config_.wait_threshold_s * speed};
  return build_probability_field(query, config_.alpha, snapshot(), demand_, net_, dm_, params,
                                 speed);
}

void Simulation::check_invariants() const {
  long long waiting = 0, matched = 0, picked = 0, completed = 0, cancelled = 0;
  for (const Request& r : requests_) {
    switch (r.status) {
      case RequestStatus::waiting: ++waiting; break;
      case RequestStatus::matched: ++matched; break;
      case RequestStatus::picked_up: ++picked; break;
      case RequestStatus::completed: ++completed; break;
      case RequestStatus::cancelled: ++cancelled; break;
    }
  }
  if (waiting + matched + picked + completed + cancelled !=
      static_cast<long long>(requests_.size()))
    fail(Errc::internal, "request conservation violated");

  for (const Vehicle& v : vehicles_) {
    const bool in_pool = pooled_route_members_.count(v.id) > 0;
    if (in_pool != (v.state == VehicleState::partially_occupied))
      fail(Errc::internal, "committed-route set inconsistent with vehicle states");
    switch (v.state) {
      case VehicleState::idle:
        if (v.aboard() != 0 || !v.itinerary.empty())
          fail(Errc::internal, "idle vehicle with cargo or route");
        break;
      case VehicleState::to_first_pickup:
        if (v.aboard() != 0 || v.pax_a < 0) fail(Errc::internal, "bad to_first_pickup state");
        break;
      case VehicleState::partially_occupied:
        if (!v.a_aboard || v.b_aboard || v.committed_route.empty())
          fail(Errc::internal, "bad partially_occupied state");
        break;
      case VehicleState::to_second_pickup:
        if (!v.a_aboard || v.b_aboard || v.pax_b < 0)
          fail(Errc::internal, "bad to_second_pickup state");
        break;
      case VehicleState::dual_occupied:
        if (v.aboard() != 2) fail(Errc::internal, "bad dual_occupied state");
        break;
      case VehicleState::dropping_last:
        if (v.aboard() != 1) fail(Errc::internal, "bad dropping_last state");
        break;
    }
  }
}

}  // namespace ridepool
