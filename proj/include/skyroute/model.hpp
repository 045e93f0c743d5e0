#pragma once

// Domain types for skyway networks, drones, requests and composed plans.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "skyroute/error.hpp"
#include "skyroute/geo.hpp"

namespace skyroute {

/// Integer seconds from the scenario epoch.
using Seconds = std::int64_t;

using StationIndex = std::size_t;
using SegmentIndex = std::size_t;

struct Station {
  std::string id;
  LatLon position;
  int pads = 0;
  bool recharge = true;     // may serve as an intermediate recharge stop
  bool source = true;       // may start a delivery
  bool destination = true;  // may end a delivery
};

/// Directed skyway segment. Distance and bearing are derived from the
/// endpoint positions at load time and never read from input.
struct Segment {
  StationIndex from = 0;
  StationIndex to = 0;
  double distance_km = 0.0;
  double bearing_deg = 0.0;
};

class SkywayNetwork {
 public:
  SkywayNetwork() = default;

  /// Validates and builds a network. Each undirected pair may be listed once
  /// or once per direction; the missing direction is added with its own
  /// bearing.
  static SkywayNetwork build(std::vector<Station> stations,
                             const std::vector<std::pair<std::string, std::string>>& links) {
    SkywayNetwork net;
    net.stations_ = std::move(stations);
    for (StationIndex i = 0; i < net.stations_.size(); ++i) {
      const Station& s = net.stations_[i];
      if (s.id.empty()) throw ValidationError("station with empty id");
      if (!net.index_.emplace(s.id, i).second) throw ValidationError("duplicate station id '" + s.id + "'");
      if (s.recharge && s.pads < 1) throw ValidationError("recharge station '" + s.id + "' needs at least one pad");
      if (s.pads < 0) throw ValidationError("negative pad count at '" + s.id + "'");
      if (std::abs(s.position.lat) > 90.0 || std::abs(s.position.lon) > 180.0)
        throw ValidationError("station '" + s.id + "' has out-of-range coordinates");
    }

    std::vector<std::pair<StationIndex, StationIndex>> listed;
    listed.reserve(links.size());
    for (const auto& [a, b] : links) {
      const auto ia = net.index_of(a);
      const auto ib = net.index_of(b);
      if (!ia || !ib) throw ValidationError("segment " + a + "->" + b + " references an unknown station");
      if (*ia == *ib) throw ValidationError("segment " + a + "->" + b + " is a self loop");
      listed.emplace_back(*ia, *ib);
    }
    {
      auto sorted = listed;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ValidationError("duplicate segment in network document");
    }

    net.out_.assign(net.stations_.size(), {});
    auto add = [&net](StationIndex a, StationIndex b) {
      if (net.find_segment(a, b)) return;
      const GreatCircle gc = great_circle(net.stations_[a].position, net.stations_[b].position);
      if (!(gc.distance_km > 0.0))
        throw ValidationError("zero-length segment " + net.stations_[a].id + "->" + net.stations_[b].id);
      net.out_[a].push_back(net.segments_.size());
      net.segments_.push_back({a, b, gc.distance_km, gc.bearing_deg});
    };
    for (const auto& [a, b] : listed) {
      add(a, b);
      add(b, a);
    }
    // Stable neighbour order: lexicographic by destination id.
    for (auto& adj : net.out_) {
      std::sort(adj.begin(), adj.end(), [&net](SegmentIndex x, SegmentIndex y) {
        return net.stations_[net.segments_[x].to].id < net.stations_[net.segments_[y].to].id;
      });
    }
    net.check_connected();
    return net;
  }

  const std::vector<Station>& stations() const { return stations_; }
  const std::vector<Segment>& segments() const { return segments_; }
  std::size_t size() const { return stations_.size(); }

  const Station& station(StationIndex i) const { return stations_.at(i); }
  const Segment& segment(SegmentIndex i) const { return segments_.at(i); }

  std::optional<StationIndex> index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  StationIndex require(const std::string& id) const {
    auto i = index_of(id);
    if (!i) throw ValidationError("unknown station '" + id + "'");
    return *i;
  }

  std::span<const SegmentIndex> outgoing(StationIndex i) const { return out_.at(i); }

  std::optional<SegmentIndex> find_segment(StationIndex from, StationIndex to) const {
    for (SegmentIndex s : out_.at(from))
      if (segments_[s].to == to) return s;
    return std::nullopt;
  }

 private:
  void check_connected() const {
    std::vector<StationIndex> recharge;
    for (StationIndex i = 0; i < stations_.size(); ++i) {
      if (stations_[i].recharge) recharge.push_back(i);
      else if (out_[i].empty()) throw ValidationError("station '" + stations_[i].id + "' has no segments");
    }
    if (recharge.empty()) return;
    std::vector<bool> seen(stations_.size(), false);
    std::queue<StationIndex> frontier;
    frontier.push(recharge.front());
    seen[recharge.front()] = true;
    while (!frontier.empty()) {
      const StationIndex u = frontier.front();
      frontier.pop();
      for (SegmentIndex s : out_[u]) {
        const StationIndex v = segments_[s].to;
        if (!seen[v] && stations_[v].recharge) {
          seen[v] = true;
          frontier.push(v);
        }
      }
    }
    for (StationIndex i : recharge)
      if (!seen[i]) throw ValidationError("recharge graph is disconnected at '" + stations_[i].id + "'");
  }

  std::vector<Station> stations_;
  std::vector<Segment> segments_;
  std::vector<std::vector<SegmentIndex>> out_;
  std::unordered_map<std::string, StationIndex> index_;
};

/// QoS record of one drone service offering.
struct Drone {
  std::string id;
  std::string provider;
  double max_payload_kg = 0.0;
  double max_flight_time_min = 0.0;  // full battery, zero payload
  double air_speed_kmh = 0.0;
  double max_range_km = 0.0;         // air_speed * flight time, calm air
  double full_recharge_min = 0.0;    // 0% -> 100%
  double payload_derate = 1.0;       // flight-time fraction left at max payload

  void validate() const {
    if (id.empty()) throw ValidationError("drone with empty id");
    const auto positive = [this](double v, const char* what) {
      if (!(v > 0.0)) throw ValidationError("drone '" + id + "': " + what + " must be > 0");
    };
    positive(max_payload_kg, "max_payload_kg");
    positive(max_flight_time_min, "max_flight_time_min");
    positive(air_speed_kmh, "air_speed_kmh");
    positive(max_range_km, "max_range_km");
    positive(full_recharge_min, "full_recharge_min");
    if (!(payload_derate > 0.0 && payload_derate <= 1.0))
      throw ValidationError("drone '" + id + "': payload_derate must be in (0, 1]");
    const double calm_range = air_speed_kmh * max_flight_time_min / 60.0;
    if (std::abs(max_range_km - calm_range) > 0.01 * calm_range)
      throw ValidationError("drone '" + id + "': max_range_km inconsistent with speed x flight time");
  }
};

struct DeliveryRequest {
  std::string src;
  std::string dst;
  double payload_kg = 0.0;
  Seconds start_time = 0;

  void validate() const {
    if (src == dst) throw ValidationError("request source equals destination");
    if (!(payload_kg > 0.0)) throw ValidationError("request payload must be > 0");
    if (start_time < 0) throw ValidationError("request start time must be >= 0");
  }
};

/// Wind that priced a leg: either a planner expectation or one concrete state.
struct LegWind {
  bool expected = true;
  double speed_kmh = 0.0;
  double bearing_deg = 0.0;
};

struct DaaSLeg {
  std::string daas_id;
  std::string from;
  std::string to;
  Seconds depart = 0;
  Seconds arrive = 0;
  Seconds wait_s = 0;
  Seconds recharge_s = 0;
  LegWind wind_state_used;

  Seconds flight_s() const { return arrive - depart; }
};

struct CompositionPlan {
  std::string cs_id;
  std::string drone_id;
  DeliveryRequest request;
  std::vector<DaaSLeg> legs;
  Seconds total_time_s = 0;

  std::vector<std::string> stations() const {
    std::vector<std::string> out;
    if (legs.empty()) return out;
    out.push_back(legs.front().from);
    for (const auto& leg : legs) out.push_back(leg.to);
    return out;
  }
};

inline std::string make_cs_id(const DeliveryRequest& r, const std::string& drone_id) {
  return "cs:" + r.src + ":" + r.dst + ":" + std::to_string(r.start_time) + ":" + drone_id;
}

inline std::string make_daas_id(const std::string& cs_id, std::size_t leg) {
  return cs_id + "#" + std::to_string(leg);
}

/// Returns a description of the first violated plan invariant, if any.
inline std::optional<std::string> plan_violation(const CompositionPlan& plan) {
  if (plan.legs.empty()) return "plan has no legs";
  if (plan.legs.front().from != plan.request.src) return "first leg does not start at the source";
  if (plan.legs.back().to != plan.request.dst) return "last leg does not end at the destination";
  if (plan.legs.front().depart != plan.request.start_time) return "first leg does not depart at the start time";
  Seconds sum = 0;
  for (std::size_t k = 0; k < plan.legs.size(); ++k) {
    const DaaSLeg& leg = plan.legs[k];
    if (leg.arrive <= leg.depart) return "leg " + std::to_string(k) + " does not move forward in time";
    if (leg.wait_s < 0 || leg.recharge_s < 0) return "leg " + std::to_string(k) + " has negative wait or recharge";
    if (k + 1 < plan.legs.size()) {
      const DaaSLeg& next = plan.legs[k + 1];
      if (leg.to != next.from) return "legs " + std::to_string(k) + " and " + std::to_string(k + 1) + " are not contiguous";
      if (next.depart != leg.arrive + leg.wait_s + leg.recharge_s)
        return "leg " + std::to_string(k + 1) + " departs at the wrong time";
    } else if (leg.wait_s != 0 || leg.recharge_s != 0) {
      return "destination leg carries wait or recharge";
    }
    sum += leg.flight_s() + leg.wait_s + leg.recharge_s;
  }
  if (plan.total_time_s != plan.legs.back().arrive - plan.request.start_time) return "total time does not match last arrival";
  if (plan.total_time_s != sum) return "total time does not equal the sum of leg times";
  return std::nullopt;
}

}  // namespace skyroute
