#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "skyroute/skyroute.hpp"

namespace testing_support {

using namespace skyroute;

inline std::string fixture(const std::string& name) { return std::string(SKYROUTE_FIXTURES) + "/" + name; }

inline Station station(std::string id, double lat, double lon, int pads = 5, bool recharge = true) {
  Station s;
  s.id = std::move(id);
  s.position = {lat, lon};
  s.pads = pads;
  s.recharge = recharge;
  return s;
}

/// Point `east_km`/`north_km` away from (0, 0) on the equator-centred sphere.
inline LatLon at_km(double east_km, double north_km) {
  const double km_per_deg = kEarthRadiusKm * std::numbers::pi / 180.0;
  return {north_km / km_per_deg, east_km / km_per_deg};
}

inline Station station_km(std::string id, double east_km, double north_km, int pads = 5) {
  const LatLon p = at_km(east_km, north_km);
  return station(std::move(id), p.lat, p.lon, pads);
}

/// Simple test drone: airspeed 60 km/h, 24 min, 1.5 kg, 60 min recharge.
inline Drone test_drone(std::string id = "t1") {
  Drone d;
  d.id = std::move(id);
  d.provider = "test";
  d.max_payload_kg = 1.5;
  d.max_flight_time_min = 24.0;
  d.air_speed_kmh = 60.0;
  d.max_range_km = 24.0;
  d.full_recharge_min = 60.0;
  d.payload_derate = 0.7;
  return d;
}

/// A random small world with deterministic wind and scripted traffic, built
/// twice: once as library objects and once as the oracle's own description.
struct RandomWorld {
  SkywayNetwork net;
  WindField wind;
  std::vector<TrafficRecord> traffic;
  Drone drone;
  DeliveryRequest request;
  oracle::World reference;
};

inline RandomWorld random_world(std::uint64_t seed, std::size_t max_nodes, int wind_outcomes = 1) {
  Rng rng(mix_seed(seed, 77));
  RandomWorld w;
  const std::size_t n = 4 + uniform_index(rng, max_nodes - 3);
  const double side = 14.0;
  std::vector<Station> st;
  for (std::size_t i = 0; i < n; ++i) {
    const LatLon p = at_km(uniform(rng, 0.0, side), uniform(rng, 0.0, side));
    const int pads = 1 + static_cast<int>(uniform_index(rng, 2));
    st.push_back(station("N" + std::to_string(i), p.lat, p.lon, pads));
  }
  // Spanning chain plus random extra links keeps the graph connected.
  std::vector<std::pair<std::string, std::string>> links;
  for (std::size_t i = 1; i < n; ++i) links.emplace_back(st[uniform_index(rng, i)].id, st[i].id);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& [a, b] : links) {
    const std::size_t ia = std::stoul(a.substr(1)), ib = std::stoul(b.substr(1));
    seen.insert({std::min(ia, ib), std::max(ia, ib)});
  }
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t a = uniform_index(rng, n), b = uniform_index(rng, n);
    if (a == b || seen.count({std::min(a, b), std::max(a, b)})) continue;
    seen.insert({std::min(a, b), std::max(a, b)});
    links.emplace_back(st[a].id, st[b].id);
  }
  w.net = SkywayNetwork::build(st, links);

  w.drone = test_drone();
  w.drone.full_recharge_min = 30.0 + uniform(rng, 0.0, 60.0);
  w.request = {"N0", "N" + std::to_string(n - 1), 0.2 + uniform(rng, 0.0, 1.0), static_cast<Seconds>(uniform_index(rng, 1800))};

  w.wind.slot_len_s = 900;
  auto draw = [&](int outcomes) {
    WindDistribution d;
    double left = 1.0;
    for (int k = 0; k < outcomes; ++k) {
      const double p = k + 1 == outcomes ? left : left * uniform(rng, 0.3, 0.7);
      left -= p;
      d.outcomes.push_back({{uniform(rng, 0.0, 35.0), uniform(rng, 0.0, 360.0)}, p});
    }
    return d;
  };
  for (int s = 0; s < 8; ++s) w.wind.default_slots.push_back(draw(wind_outcomes));
  for (const auto& seg : w.net.segments()) {
    if (uniform01(rng) < 0.3) {
      std::vector<WindDistribution> slots;
      for (int s = 0; s < 8; ++s) slots.push_back(draw(wind_outcomes));
      w.wind.segment_slots[segment_key(w.net.station(seg.from).id, w.net.station(seg.to).id)] = std::move(slots);
    }
  }
  for (StationIndex i = 0; i < n; ++i) {
    const int jobs = static_cast<int>(uniform_index(rng, 6));
    for (int k = 0; k < jobs; ++k)
      w.traffic.push_back({w.net.station(i).id, static_cast<Seconds>(uniform_index(rng, 7200)),
                           static_cast<Seconds>(300 + uniform_index(rng, 3600))});
  }

  oracle::World& o = w.reference;
  for (const auto& s : w.net.stations()) o.nodes.push_back({s.id, s.position.lat, s.position.lon, s.pads, s.recharge});
  for (const auto& [a, b] : links) {
    const int ia = std::stoi(a.substr(1)), ib = std::stoi(b.substr(1));
    o.edges.insert({ia, ib});
    o.edges.insert({ib, ia});
  }
  o.slot_len = w.wind.slot_len_s;
  for (const auto& d : w.wind.default_slots)
    o.default_wind.push_back({d.outcomes[0].state.speed_kmh, d.outcomes[0].state.bearing_deg});
  for (const auto& [key, slots] : w.wind.segment_slots) {
    const auto arrow = key.find("→");
    const int a = std::stoi(key.substr(1, arrow - 1));
    const int b = std::stoi(key.substr(arrow + std::string("→").size() + 1));
    for (const auto& d : slots) o.seg_wind[{a, b}].push_back({d.outcomes[0].state.speed_kmh, d.outcomes[0].state.bearing_deg});
  }
  for (const auto& r : w.traffic)
    o.traffic[std::stoi(r.station_id.substr(1))].emplace_back(static_cast<double>(r.arrival_s),
                                                               static_cast<double>(r.occupy_s));
  o.as = w.drone.air_speed_kmh;
  o.flight_min = w.drone.max_flight_time_min;
  o.recharge_min = w.drone.full_recharge_min;
  o.max_payload = w.drone.max_payload_kg;
  o.derate = w.drone.payload_derate;
  o.payload = w.request.payload_kg;
  o.start = w.request.start_time;
  return w;
}

}  // namespace testing_support
