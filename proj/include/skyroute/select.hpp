#pragma once

// Skyline (Pareto) selection of drones for a payload, via Block Nested Loop.

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "skyroute/error.hpp"
#include "skyroute/model.hpp"

namespace skyroute {

/// Attributes compared for dominance: payload, airspeed and flight time are
/// maximized; full recharge time is minimized.
inline bool dominates(const Drone& a, const Drone& b) {
  const bool no_worse = a.max_payload_kg >= b.max_payload_kg && a.air_speed_kmh >= b.air_speed_kmh &&
                        a.max_flight_time_min >= b.max_flight_time_min && a.full_recharge_min <= b.full_recharge_min;
  const bool better = a.max_payload_kg > b.max_payload_kg || a.air_speed_kmh > b.air_speed_kmh ||
                      a.max_flight_time_min > b.max_flight_time_min || a.full_recharge_min < b.full_recharge_min;
  return no_worse && better;
}

/// Drones able to lift `payload_kg` that no other such drone dominates, in
/// input order. The window is unbounded, so one pass suffices.
inline std::vector<Drone> bnl_skyline(std::span<const Drone> drones, double payload_kg) {
  std::vector<Drone> window;
  bool any_capable = false;
  for (const Drone& candidate : drones) {
    if (candidate.max_payload_kg < payload_kg) continue;
    any_capable = true;
    bool dominated = false;
    for (auto it = window.begin(); it != window.end();) {
      if (dominates(*it, candidate)) {
        dominated = true;
        break;
      }
      if (dominates(candidate, *it)) {
        it = window.erase(it);
      } else {
        ++it;
      }
    }
    if (!dominated) window.push_back(candidate);
  }
  if (!any_capable) throw NoCapableDrone("no drone can carry " + std::to_string(payload_kg) + " kg");
  return window;
}

/// Highest calm-air range proxy (airspeed x flight time); ties go to the
/// shorter recharge, then the smaller id.
inline const Drone& pick_drone(std::span<const Drone> skyline) {
  if (skyline.empty()) throw NoCapableDrone("empty skyline");
  const auto better = [](const Drone& a, const Drone& b) {
    const double pa = a.air_speed_kmh * a.max_flight_time_min;
    const double pb = b.air_speed_kmh * b.max_flight_time_min;
    if (pa != pb) return pa > pb;
    if (a.full_recharge_min != b.full_recharge_min) return a.full_recharge_min < b.full_recharge_min;
    return a.id < b.id;
  };
  const Drone* best = &skyline.front();
  for (const Drone& d : skyline)
    if (better(d, *best)) best = &d;
  return *best;
}

}  // namespace skyroute
