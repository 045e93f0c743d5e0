#pragma once

// Battery accounting. Energy draw is proportional to airborne time at cruise
// airspeed; wind changes how far that time gets you, not the draw rate.

#include <algorithm>
#include <string>

#include "skyroute/error.hpp"
#include "skyroute/model.hpp"

namespace skyroute {

inline constexpr double kDefaultSafetyMargin = 1.2;

struct BatteryState {
  double fraction = 1.0;
};

/// Payload derating: 1 at zero payload, linear down to payload_derate at max payload.
inline double payload_factor(const Drone& drone, double payload_kg) {
  if (payload_kg > drone.max_payload_kg)
    throw OverPayload("payload " + std::to_string(payload_kg) + " kg exceeds capacity of drone '" + drone.id + "'");
  const double share = std::max(0.0, payload_kg) / drone.max_payload_kg;
  return 1.0 - (1.0 - drone.payload_derate) * share;
}

inline double endurance_s(const Drone& drone, double payload_kg, BatteryState battery) {
  return battery.fraction * drone.max_flight_time_min * 60.0 * payload_factor(drone, payload_kg);
}

inline bool reachable(const Drone& drone, double payload_kg, BatteryState battery, double expected_seconds,
                      double safety_margin = kDefaultSafetyMargin) {
  return expected_seconds * safety_margin <= endurance_s(drone, payload_kg, battery);
}

/// Battery left after `flight_s` airborne seconds; may be negative, which
/// means the leg could not be completed.
inline double remaining_after(const Drone& drone, double payload_kg, BatteryState before, double flight_s) {
  return before.fraction - flight_s / endurance_s(drone, payload_kg, BatteryState{1.0});
}

inline BatteryState battery_after(const Drone& drone, double payload_kg, BatteryState before, double flight_s) {
  return {std::clamp(remaining_after(drone, payload_kg, before, flight_s), 0.0, 1.0)};
}

/// Seconds to recharge to 100%.
inline double recharge_s(const Drone& drone, BatteryState before) {
  return (1.0 - before.fraction) * drone.full_recharge_min * 60.0;
}

}  // namespace skyroute
