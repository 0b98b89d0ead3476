#include "metrics.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "util.hpp"

namespace ridepool {

namespace {

std::string detail_value(const std::string& detail, const std::string& key) {
  for (const auto part : split(detail, ';')) {
    const auto kv = split(part, ':');
    if (kv.size() == 2 && trim(kv[0]) == key) return std::string(trim(kv[1]));
  }
  fail(Errc::malformed_record, "event detail missing key '" + key + "' in '" + detail + "'");
}

struct ReplayVehicle {
  std::vector<int> riders;
  double empty_m = 0.0;
  double solo_m = 0.0;
  double shared_m = 0.0;
};

struct ReplayRequest {
  int64_t issue_ms = -1;
  int64_t pickup_ms = -1;
  bool completed = false;
  bool cancelled = false;
  bool shared = false;
};

}  // namespace

bool metrics_equal(const Metrics& a, const Metrics& b) {
  return a.issued == b.issued && a.completed == b.completed && a.cancelled == b.cancelled &&
         a.in_flight == b.in_flight && a.answer_rate == b.answer_rate &&
         a.answer_rate_defined == b.answer_rate_defined && a.avg_wait_s == b.avg_wait_s &&
         a.shared_orders == b.shared_orders && a.shared_distance_km == b.shared_distance_km &&
         a.empty_distance_km == b.empty_distance_km && a.solo_distance_km == b.solo_distance_km &&
         a.total_distance_km == b.total_distance_km && a.plans_total == b.plans_total &&
         a.certified_fraction == b.certified_fraction &&
         a.mean_detour_ratio == b.mean_detour_ratio;
}

Metrics live_metrics(const Simulation& sim) {
  Metrics m;
  int64_t wait_sum_ms = 0;
  for (const Request& r : sim.requests()) {
    ++m.issued;
    switch (r.status) {
      case RequestStatus::completed:
        ++m.completed;
        wait_sum_ms += r.pickup_ms - r.issue_ms;
        if (r.shared) ++m.shared_orders;
        break;
      case RequestStatus::cancelled: ++m.cancelled; break;
      default: break;
    }
  }
  m.in_flight = m.issued - m.completed - m.cancelled;
  m.answer_rate_defined = m.issued > 0;
  m.answer_rate = m.issued > 0 ? static_cast<double>(m.completed) / static_cast<double>(m.issued)
                               : 0.0;
  m.avg_wait_s =
      m.completed > 0 ? static_cast<double>(wait_sum_ms) / 1000.0 / static_cast<double>(m.completed)
                      : 0.0;

  double empty_m = 0.0, solo_m = 0.0, shared_m = 0.0;
  for (const Vehicle& v : sim.vehicles()) {
    empty_m += v.odo_empty_m;
    solo_m += v.odo_solo_m;
    shared_m += v.odo_shared_m;
  }
  m.empty_distance_km = empty_m / 1000.0;
  m.solo_distance_km = solo_m / 1000.0;
  m.shared_distance_km = shared_m / 1000.0;
  m.total_distance_km = (empty_m + solo_m + shared_m) / 1000.0;

  double ratio_sum = 0.0;
  long long certified = 0;
  for (const PlanAudit& a : sim.plan_audits()) {
    ++m.plans_total;
    if (a.certified) ++certified;
    ratio_sum += a.planned_m / a.shortest_m;
  }
  m.certified_fraction =
      m.plans_total > 0 ? static_cast<double>(certified) / static_cast<double>(m.plans_total) : 0.0;
  m.mean_detour_ratio = m.plans_total > 0 ? ratio_sum / static_cast<double>(m.plans_total) : 0.0;
  return m;
}

Metrics compute_metrics(const std::vector<EventRow>& rows) {
  std::map<int, ReplayVehicle> vehicles;
  std::map<int, ReplayRequest> requests;
  long long plans_total = 0;
  long long plans_certified = 0;
  double ratio_sum = 0.0;

  for (const EventRow& row : rows) {
    switch (row.type) {
      case EventType::issue:
        requests[row.request].issue_ms = row.time_ms;
        break;
      case EventType::pickup: {
        ReplayVehicle& v = vehicles[row.vehicle];
        v.riders.push_back(row.request);
        requests[row.request].pickup_ms = row.time_ms;
        if (v.riders.size() == 2)
          for (int rid : v.riders) requests[rid].shared = true;
        break;
      }
      case EventType::dropoff: {
        ReplayVehicle& v = vehicles[row.vehicle];
        std::erase(v.riders, row.request);
        requests[row.request].completed = true;
        break;
      }
      case EventType::cancel:
        requests[row.request].cancelled = true;
        break;
      case EventType::traverse: {
        ReplayVehicle& v = vehicles[row.vehicle];
        const double len = parse_double(detail_value(row.detail, "len_m"), "traverse event");
        switch (v.riders.size()) {
          case 0: v.empty_m += len; break;
          case 1: v.solo_m += len; break;
          default: v.shared_m += len; break;
        }
        break;
      }
      case EventType::plan: {
        ++plans_total;
        if (detail_value(row.detail, "certified") == "1") ++plans_certified;
        const double len = parse_double(detail_value(row.detail, "len_m"), "plan event");
        const double shortest = parse_double(detail_value(row.detail, "shortest_m"), "plan event");
        ratio_sum += len / shortest;
        break;
      }
      case EventType::match:
      case EventType::interrupt:
        break;
    }
  }

  Metrics m;
  int64_t wait_sum_ms = 0;
  for (const auto& [id, r] : requests) {
    (void)id;
    ++m.issued;
    if (r.completed) {
      ++m.completed;
      wait_sum_ms += r.pickup_ms - r.issue_ms;
      if (r.shared) ++m.shared_orders;
    } else if (r.cancelled) {
      ++m.cancelled;
    }
  }
  m.in_flight = m.issued - m.completed - m.cancelled;
  m.answer_rate_defined = m.issued > 0;
  m.answer_rate = m.issued > 0 ? static_cast<double>(m.completed) / static_cast<double>(m.issued)
                               : 0.0;
  m.avg_wait_s =
      m.completed > 0 ? static_cast<double>(wait_sum_ms) / 1000.0 / static_cast<double>(m.completed)
                      : 0.0;

  double empty_m = 0.0, solo_m = 0.0, shared_m = 0.0;
  for (const auto& [id, v] : vehicles) {
    (void)id;
    empty_m += v.empty_m;
    solo_m += v.solo_m;
    shared_m += v.shared_m;
  }
  m.empty_distance_km = empty_m / 1000.0;
  m.solo_distance_km = solo_m / 1000.0;
  m.shared_distance_km = shared_m / 1000.0;
  m.total_distance_km = (empty_m + solo_m + shared_m) / 1000.0;

  m.plans_total = plans_total;
  m.certified_fraction =
      plans_total > 0 ? static_cast<double>(plans_certified) / static_cast<double>(plans_total)
                      : 0.0;
  m.mean_detour_ratio = plans_total > 0 ? ratio_sum / static_cast<double>(plans_total) : 0.0;
  return m;
}

Metrics compute_metrics_file(const std::string& event_log_path) {
  return compute_metrics(parse_event_log(event_log_path));
}

std::string metrics_kv(const Metrics& m, const SimulationConfig& config) {
  std::ostringstream out;
  out << "policy = " << policy_name(config.policy) << '\n';
  out << "seed = " << config.seed << '\n';
  out << "fleet_size = " << config.fleet_size << '\n';
  out << "alpha = " << format_exact(config.alpha) << '\n';
  out << "duration_s = " << format_exact(config.duration_s) << '\n';
  out << "issued = " << m.issued << '\n';
  out << "completed = " << m.completed << '\n';
  out << "cancelled = " << m.cancelled << '\n';
  out << "in_flight = " << m.in_flight << '\n';
  out << "answer_rate = " << format_fixed(m.answer_rate, 6) << '\n';
  out << "answer_rate_defined = " << (m.answer_rate_defined ? 1 : 0) << '\n';
  out << "avg_wait_s = " << format_fixed(m.avg_wait_s, 1) << '\n';
  out << "shared_orders = " << m.shared_orders << '\n';
  out << "shared_distance_km = " << format_fixed(m.shared_distance_km, 3) << '\n';
  out << "empty_distance_km = " << format_fixed(m.empty_distance_km, 3) << '\n';
  out << "solo_distance_km = " << format_fixed(m.solo_distance_km, 3) << '\n';
  out << "total_distance_km = " << format_fixed(m.total_distance_km, 3) << '\n';
  out << "plans_total = " << m.plans_total << '\n';
  out << "certified_fraction = " << format_fixed(m.certified_fraction, 6) << '\n';
  out << "mean_detour_ratio = " << format_fixed(m.mean_detour_ratio, 6) << '\n';
  return out.str();
}

std::string metrics_table(const Metrics& m) {
  std::ostringstream out;
  out << "metric                      value\n";
  out << "answer_rate_pct             " << format_fixed(100.0 * m.answer_rate, 2)
      << (m.answer_rate_defined ? "" : "   (no requests issued)") << '\n';
  out << "avg_waiting_time_s          " << format_fixed(m.avg_wait_s, 1) << '\n';
  out << "shared_orders               " << m.shared_orders << '\n';
  out << "total_shared_distance_km    " << format_fixed(m.shared_distance_km, 3) << '\n';
  out << "total_empty_distance_km     " << format_fixed(m.empty_distance_km, 3) << '\n';
  out << "total_solo_distance_km      " << format_fixed(m.solo_distance_km, 3) << '\n';
  out << "completed / issued          " << m.completed << " / " << m.issued << '\n';
  out << "certified_plan_fraction     " << format_fixed(m.certified_fraction, 4) << '\n';
  out << "mean_plan_to_shortest       " << format_fixed(m.mean_detour_ratio, 4) << '\n';
  return out.str();
}

void write_text_file(const std::string& content, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write file: " + path);
  out << content;
  if (!out) fail(Errc::io_error, "write failed: " + path);
}

}  // namespace ridepool
