#pragma once

// Delivery composers: Probabilistic Forward Search (planner under uncertainty),
// Informed Exhaustive Search (all simple paths under known ground truth), and
// replay of a station sequence against ground truth.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "skyroute/congestion.hpp"
#include "skyroute/energy.hpp"
#include "skyroute/error.hpp"
#include "skyroute/model.hpp"
#include "skyroute/select.hpp"
#include "skyroute/wind.hpp"

namespace skyroute {

inline Seconds to_seconds(double s) { return static_cast<Seconds>(std::llround(s)); }

/// Anything that can estimate the expected pad wait at a station for a
/// distribution of arrival times.
template <class M>
concept WaitModel = requires(const M& m, StationIndex i, std::span<const TimedArrival> arrivals) {
  { m.expected_wait(i, arrivals) } -> std::convertible_to<double>;
};

/// Estimate of the remaining time from a candidate to the destination.
enum class Heuristic {
  flight_time,         // great-circle distance / speed
  flight_and_recharge  // plus the least recharge that remaining flight implies
};

struct SearchConfig {
  int fs = 2;  // forward-search depth; 2 looks at next-to-adjacent stations
  Heuristic heuristic = Heuristic::flight_time;
  double max_infeasible_prob = 0.2;
  double safety_margin = kDefaultSafetyMargin;
  double dest_heuristic_speed_kmh = 0.0;  // <= 0: use the drone's airspeed
  std::size_t ies_cap = 14;

  void validate() const {
    if (fs < 1) throw ValidationError("forward-search depth must be >= 1");
    if (!(max_infeasible_prob >= 0.0 && max_infeasible_prob <= 1.0))
      throw ValidationError("max infeasible probability must be in [0, 1]");
    if (!(safety_margin >= 1.0)) throw ValidationError("safety margin must be >= 1");
  }
};

struct SearchStats {
  std::size_t segment_evaluations = 0;  // wind-priced segment lookups
  std::size_t steps = 0;
  std::size_t paths = 0;  // complete compositions enumerated (IES)
};

struct ScoredCandidate {
  StationIndex station = 0;
  double expected_total_s = 0.0;
  double p_infeasible = 0.0;
  bool dead_end = false;
};

namespace detail {

inline void check_endpoints(const SkywayNetwork& net, StationIndex src, StationIndex dst) {
  if (!net.station(src).source) throw ValidationError("station '" + net.station(src).id + "' cannot start a delivery");
  if (!net.station(dst).destination)
    throw ValidationError("station '" + net.station(dst).id + "' cannot end a delivery");
}

template <WaitModel Wait>
class ForwardSearch {
 public:
  ForwardSearch(const SkywayNetwork& net, const BoundWind& wind, const Wait& wait, const Drone& drone,
                const DeliveryRequest& request, const SearchConfig& config, SearchStats& stats)
      : net_(net), wind_(wind), wait_(wait), drone_(drone), req_(request), cfg_(config), stats_(stats),
        dst_(net.require(request.dst)),
        heuristic_speed_(config.dest_heuristic_speed_kmh > 0.0 ? config.dest_heuristic_speed_kmh
                                                                : drone.air_speed_kmh),
        visited_(net.size(), false) {
    const double endurance = endurance_s(drone, request.payload_kg, BatteryState{1.0});
    recharge_per_s_ = drone.full_recharge_min * 60.0 / endurance;
    double longest_km = 0.0;
    for (SegmentIndex s : net.outgoing(dst_)) longest_km = std::max(longest_km, net.segment(s).distance_km);
    final_leg_s_ = std::min(endurance, longest_km / heuristic_speed_ * 3600.0);
  }

  CompositionPlan run() {
    const StationIndex src = net_.require(req_.src);
    check_endpoints(net_, src, dst_);
    payload_factor(drone_, req_.payload_kg);  // throws OverPayload

    CompositionPlan plan;
    plan.drone_id = drone_.id;
    plan.request = req_;
    plan.cs_id = make_cs_id(req_, drone_.id);

    StationIndex cur = src;
    Seconds now = req_.start_time;
    BatteryState battery{1.0};
    visited_[src] = true;

    auto reach = reachable_from(cur, now, battery);
    while (!reach.empty()) {
      ++stats_.steps;
      const auto direct = std::find_if(reach.begin(), reach.end(), [this](const Hop& h) { return h.to == dst_; });
      if (direct != reach.end()) {
        append_leg(plan, cur, dst_, now, direct->estimate.expected_s, 0.0, 0.0);
        plan.total_time_s = plan.legs.back().arrive - req_.start_time;
        return plan;
      }

      const ScoredCandidate* best = nullptr;
      std::vector<ScoredCandidate> scored;
      scored.reserve(reach.size());
      for (const Hop& h : reach) scored.push_back(score(h, now));
      for (const auto& c : scored) {
        if (best == nullptr || better(c, *best)) best = &c;
      }
      const Hop& hop = *std::find_if(reach.begin(), reach.end(), [best](const Hop& h) { return h.to == best->station; });
      const StepCost step = step_cost(hop, now, battery);
      append_leg(plan, cur, hop.to, now, hop.estimate.expected_s, step.wait_s, step.recharge_s);
      const DaaSLeg& leg = plan.legs.back();
      now = leg.arrive + leg.wait_s + leg.recharge_s;
      battery = BatteryState{1.0};
      cur = hop.to;
      visited_[cur] = true;
      reach = reachable_from(cur, now, battery);
    }
    throw NoComposition("no suitable composition found from '" + req_.src + "' to '" + req_.dst + "'");
  }

 private:
  struct Hop {
    StationIndex to;
    SegmentIndex segment;
    TravelEstimate estimate;
  };

  struct StepCost {
    double wait_s;
    double recharge_s;
  };

  std::optional<TravelEstimate> price(SegmentIndex seg, Seconds depart) {
    ++stats_.segment_evaluations;
    try {
      return expected_travel_time(wind_, seg, net_.segment(seg), depart, drone_.air_speed_kmh);
    } catch (const AllInfeasible&) {
      return std::nullopt;
    }
  }

  // Stations one leg away that are unvisited, can host the stop, and pass the
  // wind-risk and energy checks.
  std::vector<Hop> reachable_from(StationIndex at, Seconds depart, BatteryState battery,
                                  const std::vector<StationIndex>& extra_visited = {}) {
    std::vector<Hop> out;
    for (SegmentIndex s : net_.outgoing(at)) {
      const StationIndex to = net_.segment(s).to;
      if (visited_[to]) continue;
      if (std::find(extra_visited.begin(), extra_visited.end(), to) != extra_visited.end()) continue;
      if (to != dst_ && !net_.station(to).recharge) continue;
      auto est = price(s, depart);
      if (!est || est->p_infeasible > cfg_.max_infeasible_prob) continue;
      if (!reachable(drone_, req_.payload_kg, battery, est->expected_s, cfg_.safety_margin)) continue;
      out.push_back({to, s, std::move(*est)});
    }
    return out;
  }

  static std::vector<TimedArrival> arrivals(const TravelEstimate& est, Seconds depart) {
    std::vector<TimedArrival> out;
    out.reserve(est.outcomes.size());
    for (const auto& o : est.outcomes) out.push_back({depart + to_seconds(o.seconds), o.p});
    return out;
  }

  StepCost step_cost(const Hop& hop, Seconds depart, BatteryState battery) const {
    const auto arr = arrivals(hop.estimate, depart);
    const double wait = wait_.expected_wait(hop.to, arr);
    const BatteryState left = battery_after(drone_, req_.payload_kg, battery, hop.estimate.expected_s);
    return {wait, recharge_s(drone_, left)};
  }

  // Only the final leg into the destination goes without a recharge, and it
  // is no longer than the longest inbound segment (or one full battery). All
  // remaining flight beyond that is recharged at full_recharge / endurance
  // seconds per second.
  double heuristic(StationIndex from) const {
    const double km = great_circle(net_.station(from).position, net_.station(dst_).position).distance_km;
    const double flight = km / heuristic_speed_ * 3600.0;
    if (cfg_.heuristic == Heuristic::flight_time) return flight;
    return flight + std::max(0.0, flight - final_leg_s_) * recharge_per_s_;
  }

  // min over successors of E[travel] + E[wait], recursing `depth` levels.
  double lookahead(StationIndex at, Seconds depart, int depth, std::vector<StationIndex>& path) {
    if (depth <= 0) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (const Hop& h : reachable_from(at, depart, BatteryState{1.0}, path)) {
      if (h.to == dst_) {
        best = std::min(best, h.estimate.expected_s);
        continue;
      }
      const StepCost step = step_cost(h, depart, BatteryState{1.0});
      double cost = h.estimate.expected_s + step.wait_s;
      if (depth > 1) {
        const Seconds next_depart = depart + to_seconds(h.estimate.expected_s) + to_seconds(step.wait_s) +
                                    to_seconds(step.recharge_s);
        path.push_back(h.to);
        cost += lookahead(h.to, next_depart, depth - 1, path);
        path.pop_back();
      }
      best = std::min(best, cost);
    }
    return best;
  }

  ScoredCandidate score(const Hop& hop, Seconds now) {
    const StepCost step = step_cost(hop, now, BatteryState{1.0});
    const double immediate = hop.estimate.expected_s + step.wait_s + step.recharge_s;
    const Seconds depart_next = now + to_seconds(hop.estimate.expected_s) + to_seconds(step.wait_s) +
                                to_seconds(step.recharge_s);
    std::vector<StationIndex> path{hop.to};
    const double forward = lookahead(hop.to, depart_next, cfg_.fs - 1, path);
    ScoredCandidate c;
    c.station = hop.to;
    c.p_infeasible = hop.estimate.p_infeasible;
    c.dead_end = std::isinf(forward);
    c.expected_total_s = immediate + (c.dead_end ? 0.0 : forward) + heuristic(hop.to);
    return c;
  }

  bool better(const ScoredCandidate& a, const ScoredCandidate& b) const {
    if (a.dead_end != b.dead_end) return !a.dead_end;
    if (a.expected_total_s != b.expected_total_s) return a.expected_total_s < b.expected_total_s;
    return net_.station(a.station).id < net_.station(b.station).id;
  }

  void append_leg(CompositionPlan& plan, StationIndex from, StationIndex to, Seconds depart, double flight_s,
                  double wait_s, double recharge) const {
    DaaSLeg leg;
    leg.daas_id = make_daas_id(plan.cs_id, plan.legs.size());
    leg.from = net_.station(from).id;
    leg.to = net_.station(to).id;
    leg.depart = depart;
    leg.arrive = depart + std::max<Seconds>(1, to_seconds(flight_s));
    leg.wait_s = to_seconds(wait_s);
    leg.recharge_s = to_seconds(recharge);
    leg.wind_state_used = LegWind{true, 0.0, 0.0};
    plan.legs.push_back(std::move(leg));
  }

  const SkywayNetwork& net_;
  const BoundWind& wind_;
  const Wait& wait_;
  const Drone& drone_;
  const DeliveryRequest& req_;
  const SearchConfig& cfg_;
  SearchStats& stats_;
  StationIndex dst_;
  double heuristic_speed_;
  double recharge_per_s_ = 0.0;
  double final_leg_s_ = 0.0;
  std::vector<bool> visited_;
};

}  // namespace detail

/// Probabilistic Forward Search. Repeatedly moves to the reachable station
/// minimizing expected travel + wait + recharge, plus an fs-1 deep lookahead
/// of expected travel + wait, plus great-circle flight time to the
/// destination. Goes straight to the destination once it is reachable.
template <WaitModel Wait>
CompositionPlan pfs_compose(const SkywayNetwork& net, const BoundWind& wind, const Wait& wait, const Drone& drone,
                            const DeliveryRequest& request, const SearchConfig& config = {},
                            SearchStats* stats = nullptr) {
  request.validate();
  config.validate();
  SearchStats local;
  detail::ForwardSearch<Wait> search(net, wind, wait, drone, request, config, stats ? *stats : local);
  return search.run();
}

enum class InfeasibleCause { energy, wind, no_segment };

inline const char* to_string(InfeasibleCause c) {
  switch (c) {
    case InfeasibleCause::energy: return "energy";
    case InfeasibleCause::wind: return "wind";
    case InfeasibleCause::no_segment: return "no-segment";
  }
  return "unknown";
}

struct InfeasibleAt {
  std::size_t leg = 0;
  InfeasibleCause cause = InfeasibleCause::energy;
  std::string detail;
};

using ReplayResult = std::variant<CompositionPlan, InfeasibleAt>;

/// Ground truth a plan is evaluated against.
struct GroundTruth {
  const WindTruth& wind;
  const TrafficSchedules& traffic;
};

namespace detail {

struct ReplayCursor {
  Seconds now = 0;
  BatteryState battery{1.0};
};

struct ReplayStep {
  DaaSLeg leg;
  std::optional<InfeasibleAt> failure;
};

// Flies one leg from `from` to `to` at cursor.now and, unless `to` is the
// destination, waits for a pad and recharges to full.
inline ReplayStep replay_leg(const SkywayNetwork& net, const Drone& drone, double payload_kg, const GroundTruth& truth,
                             StationIndex from, StationIndex to, bool final_leg, std::size_t index,
                             ReplayCursor& cursor) {
  ReplayStep out;
  const auto seg = net.find_segment(from, to);
  if (!seg) {
    out.failure = InfeasibleAt{index, InfeasibleCause::no_segment,
                               "no segment " + net.station(from).id + "->" + net.station(to).id};
    return out;
  }
  if (!final_leg && !net.station(to).recharge) {
    out.failure = InfeasibleAt{index, InfeasibleCause::energy, "station " + net.station(to).id + " cannot recharge"};
    return out;
  }
  const Segment& s = net.segment(*seg);
  const WindState w = truth.wind.at(*seg, cursor.now);
  const auto flight = travel_time(s.distance_km, drone.air_speed_kmh, w, s.bearing_deg);
  if (!flight) {
    out.failure = InfeasibleAt{index, InfeasibleCause::wind, "wind exceeds airspeed on " + net.station(from).id +
                                                                 "->" + net.station(to).id};
    return out;
  }
  const double left = remaining_after(drone, payload_kg, cursor.battery, *flight);
  if (left < 0.0) {
    out.failure = InfeasibleAt{index, InfeasibleCause::energy, "battery exhausted on " + net.station(from).id + "->" +
                                                                   net.station(to).id};
    return out;
  }
  DaaSLeg& leg = out.leg;
  leg.from = net.station(from).id;
  leg.to = net.station(to).id;
  leg.depart = cursor.now;
  leg.arrive = cursor.now + std::max<Seconds>(1, to_seconds(*flight));
  leg.wind_state_used = LegWind{false, w.speed_kmh, w.bearing_deg};
  if (!final_leg) {
    leg.wait_s = truth.traffic.wait_time(to, leg.arrive);
    leg.recharge_s = to_seconds(recharge_s(drone, BatteryState{left}));
    cursor.battery = BatteryState{1.0};
  } else {
    cursor.battery = BatteryState{left};
  }
  cursor.now = leg.arrive + leg.wait_s + leg.recharge_s;
  return out;
}

}  // namespace detail

/// Walks a station sequence under ground truth, charging exact flight, pad
/// wait and recharge times. Fails at the first leg that cannot be flown.
inline ReplayResult replay(const SkywayNetwork& net, std::span<const StationIndex> stations, const Drone& drone,
                           const DeliveryRequest& request, const GroundTruth& truth) {
  if (stations.size() < 2) throw ValidationError("a plan needs at least two stations");
  payload_factor(drone, request.payload_kg);
  CompositionPlan plan;
  plan.request = request;
  plan.drone_id = drone.id;
  plan.cs_id = make_cs_id(request, drone.id);
  detail::ReplayCursor cursor{request.start_time, BatteryState{1.0}};
  for (std::size_t k = 0; k + 1 < stations.size(); ++k) {
    auto step = detail::replay_leg(net, drone, request.payload_kg, truth, stations[k], stations[k + 1],
                                   k + 2 == stations.size(), k, cursor);
    if (step.failure) return *step.failure;
    step.leg.daas_id = make_daas_id(plan.cs_id, k);
    plan.legs.push_back(std::move(step.leg));
  }
  plan.total_time_s = plan.legs.back().arrive - request.start_time;
  return plan;
}

inline ReplayResult replay(const SkywayNetwork& net, std::span<const std::string> station_ids, const Drone& drone,
                           const DeliveryRequest& request, const GroundTruth& truth) {
  std::vector<StationIndex> idx;
  idx.reserve(station_ids.size());
  for (const auto& id : station_ids) idx.push_back(net.require(id));
  return replay(net, std::span<const StationIndex>(idx), drone, request, truth);
}

/// Informed Exhaustive Search: enumerates every simple path from source to
/// destination with full knowledge of wind and traffic, and returns the one
/// with the smallest ground-truth delivery time. Ties keep the first path
/// found in lexicographic neighbour order.
inline CompositionPlan ies_compose(const SkywayNetwork& net, const GroundTruth& truth, const Drone& drone,
                                   const DeliveryRequest& request, std::size_t node_cap = 14,
                                   SearchStats* stats = nullptr) {
  request.validate();
  if (net.size() > node_cap)
    throw CapExceeded("network has " + std::to_string(net.size()) + " stations; exhaustive search is capped at " +
                      std::to_string(node_cap));
  const StationIndex src = net.require(request.src);
  const StationIndex dst = net.require(request.dst);
  detail::check_endpoints(net, src, dst);
  payload_factor(drone, request.payload_kg);

  SearchStats local;
  SearchStats& st = stats ? *stats : local;
  std::vector<bool> on_path(net.size(), false);
  std::vector<StationIndex> path{src};
  std::vector<StationIndex> best_path;
  Seconds best_total = std::numeric_limits<Seconds>::max();
  on_path[src] = true;

  auto dfs = [&](auto&& self, StationIndex at, detail::ReplayCursor cursor) -> void {
    for (SegmentIndex s : net.outgoing(at)) {
      const StationIndex to = net.segment(s).to;
      if (on_path[to]) continue;
      const bool final_leg = to == dst;
      if (!final_leg && !net.station(to).recharge) continue;
      detail::ReplayCursor next = cursor;
      ++st.segment_evaluations;
      const auto step =
          detail::replay_leg(net, drone, request.payload_kg, truth, at, to, final_leg, path.size() - 1, next);
      if (step.failure) continue;
      path.push_back(to);
      if (final_leg) {
        ++st.paths;
        const Seconds total = step.leg.arrive - request.start_time;
        if (total < best_total) {
          best_total = total;
          best_path = path;
        }
      } else {
        on_path[to] = true;
        self(self, to, next);
        on_path[to] = false;
      }
      path.pop_back();
    }
  };
  dfs(dfs, src, detail::ReplayCursor{request.start_time, BatteryState{1.0}});

  if (best_path.empty())
    throw NoComposition("no feasible composition from '" + request.src + "' to '" + request.dst + "'");
  auto result = replay(net, std::span<const StationIndex>(best_path), drone, request, truth);
  return std::get<CompositionPlan>(std::move(result));
}

/// Drone selection followed by PFS. With `all_skyline`, plans once per
/// skyline drone and keeps the lowest expected total (ties: drone id).
template <WaitModel Wait>
CompositionPlan plan_delivery(const SkywayNetwork& net, const BoundWind& wind, const Wait& wait,
                              std::span<const Drone> fleet, const DeliveryRequest& request,
                              const SearchConfig& config = {}, bool all_skyline = false,
                              SearchStats* stats = nullptr) {
  const auto skyline = bnl_skyline(fleet, request.payload_kg);
  if (!all_skyline) return pfs_compose(net, wind, wait, pick_drone(skyline), request, config, stats);
  std::optional<CompositionPlan> best;
  for (const Drone& d : skyline) {
    try {
      auto p = pfs_compose(net, wind, wait, d, request, config, stats);
      if (!best || p.total_time_s < best->total_time_s ||
          (p.total_time_s == best->total_time_s && p.drone_id < best->drone_id))
        best = std::move(p);
    } catch (const NoComposition&) {
    }
  }
  if (!best) throw NoComposition("no skyline drone found a composition");
  return *best;
}

}  // namespace skyroute
