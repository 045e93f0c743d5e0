#pragma once

// Versioned JSON documents: skyroute-network/1, skyroute-drones/1,
// skyroute-wind/1, skyroute-traffic/1 and skyroute-plan/1.

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "skyroute/congestion.hpp"
#include "skyroute/error.hpp"
#include "skyroute/model.hpp"
#include "skyroute/wind.hpp"

namespace skyroute::io {

using json = nlohmann::json;

inline constexpr std::string_view kNetworkSchema = "skyroute-network/1";
inline constexpr std::string_view kDronesSchema = "skyroute-drones/1";
inline constexpr std::string_view kWindSchema = "skyroute-wind/1";
inline constexpr std::string_view kTrafficSchema = "skyroute-traffic/1";
inline constexpr std::string_view kPlanSchema = "skyroute-plan/1";

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

namespace detail {

inline json parse(std::string_view text, std::string_view schema) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("top-level value must be an object");
  const auto it = j.find("schema");
  if (it == j.end() || !it->is_string() || it->get<std::string>() != schema)
    throw SchemaError("expected schema '" + std::string(schema) + "'");
  return j;
}

// Runs `f`, converting nlohmann lookup and type errors into SchemaError.
template <class F>
auto guarded(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw SchemaError(std::string(what) + ": " + e.what());
  }
}

inline Seconds seconds_field(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw SchemaError(std::string("field '") + key + "' must be an integer");
  return v.get<Seconds>();
}

inline double number_field(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number()) throw SchemaError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

}  // namespace detail

// --- network ---------------------------------------------------------------

inline SkywayNetwork network_from_json(const json& j) {
  std::vector<Station> stations;
  std::vector<std::pair<std::string, std::string>> links;
  detail::guarded("network", [&] {
    for (const json& s : j.at("stations")) {
      Station st;
      st.id = s.at("id").get<std::string>();
      st.position = {detail::number_field(s, "lat"), detail::number_field(s, "lon")};
      st.pads = s.at("pads").get<int>();
      st.recharge = s.at("recharge").get<bool>();
      st.source = s.value("source", true);
      st.destination = s.value("destination", true);
      stations.push_back(std::move(st));
    }
    for (const json& g : j.at("segments")) links.emplace_back(g.at("from").get<std::string>(), g.at("to").get<std::string>());
    return 0;
  });
  return SkywayNetwork::build(std::move(stations), links);
}

inline SkywayNetwork load_network(std::string_view text) {
  return network_from_json(detail::parse(text, kNetworkSchema));
}

/// Writes each stored directed segment; distances and bearings are omitted
/// and recomputed on load.
inline json network_to_json(const SkywayNetwork& net) {
  json j;
  j["schema"] = kNetworkSchema;
  json stations = json::array();
  for (const Station& s : net.stations()) {
    json o{{"id", s.id}, {"lat", s.position.lat}, {"lon", s.position.lon}, {"pads", s.pads}, {"recharge", s.recharge}};
    if (!s.source) o["source"] = false;
    if (!s.destination) o["destination"] = false;
    stations.push_back(std::move(o));
  }
  json segments = json::array();
  for (const Segment& g : net.segments())
    segments.push_back({{"from", net.station(g.from).id}, {"to", net.station(g.to).id}});
  j["stations"] = std::move(stations);
  j["segments"] = std::move(segments);
  return j;
}

inline std::string serialize_network(const SkywayNetwork& net) { return dump(network_to_json(net)); }

// --- drones ----------------------------------------------------------------

inline json drone_to_json(const Drone& d) {
  return {{"id", d.id},
          {"provider", d.provider},
          {"max_payload_kg", d.max_payload_kg},
          {"max_flight_time_min", d.max_flight_time_min},
          {"air_speed_kmh", d.air_speed_kmh},
          {"max_range_km", d.max_range_km},
          {"full_recharge_min", d.full_recharge_min},
          {"payload_derate", d.payload_derate}};
}

inline std::vector<Drone> drones_from_json(const json& j) {
  std::vector<Drone> out = detail::guarded("drones", [&] {
    std::vector<Drone> v;
    for (const json& o : j.at("drones")) {
      Drone d;
      d.id = o.at("id").get<std::string>();
      d.provider = o.at("provider").get<std::string>();
      d.max_payload_kg = detail::number_field(o, "max_payload_kg");
      d.max_flight_time_min = detail::number_field(o, "max_flight_time_min");
      d.air_speed_kmh = detail::number_field(o, "air_speed_kmh");
      d.max_range_km = detail::number_field(o, "max_range_km");
      d.full_recharge_min = detail::number_field(o, "full_recharge_min");
      d.payload_derate = detail::number_field(o, "payload_derate");
      v.push_back(std::move(d));
    }
    return v;
  });
  std::vector<std::string> ids;
  for (const Drone& d : out) {
    d.validate();
    ids.push_back(d.id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw ValidationError("duplicate drone id");
  return out;
}

inline std::vector<Drone> load_drones(std::string_view text) { return drones_from_json(detail::parse(text, kDronesSchema)); }

inline std::string serialize_drones(std::span<const Drone> drones) {
  json j;
  j["schema"] = kDronesSchema;
  j["drones"] = json::array();
  for (const Drone& d : drones) j["drones"].push_back(drone_to_json(d));
  return dump(j);
}

// --- wind ------------------------------------------------------------------

namespace detail {

inline WindDistribution distribution_from_json(const json& arr) {
  WindDistribution d;
  for (const json& o : arr) {
    WindOutcome w;
    w.state.speed_kmh = number_field(o, "speed_kmh");
    w.state.bearing_deg = normalize_bearing(number_field(o, "bearing_deg"));
    w.p = number_field(o, "p");
    d.outcomes.push_back(w);
  }
  return d;
}

inline json distribution_to_json(const WindDistribution& d) {
  json arr = json::array();
  for (const auto& o : d.outcomes)
    arr.push_back({{"speed_kmh", o.state.speed_kmh}, {"bearing_deg", o.state.bearing_deg}, {"p", o.p}});
  return arr;
}

}  // namespace detail

inline WindField wind_from_json(const json& j) {
  WindField f = detail::guarded("wind", [&] {
    WindField w;
    w.slot_len_s = detail::seconds_field(j, "slot_len_s");
    for (const json& slot : j.at("default")) w.default_slots.push_back(detail::distribution_from_json(slot));
    if (j.contains("segments")) {
      for (const auto& [key, slots] : j.at("segments").items()) {
        std::vector<WindDistribution> v;
        for (const json& slot : slots) v.push_back(detail::distribution_from_json(slot));
        std::string k = key;
        if (auto pos = k.find("->"); pos != std::string::npos) k = segment_key(k.substr(0, pos), k.substr(pos + 2));
        w.segment_slots.emplace(std::move(k), std::move(v));
      }
    }
    return w;
  });
  f.validate();
  return f;
}

inline WindField load_wind(std::string_view text) { return wind_from_json(detail::parse(text, kWindSchema)); }

inline std::string serialize_wind(const WindField& f) {
  json j;
  j["schema"] = kWindSchema;
  j["slot_len_s"] = f.slot_len_s;
  j["default"] = json::array();
  for (const auto& d : f.default_slots) j["default"].push_back(detail::distribution_to_json(d));
  json segs = json::object();
  for (const auto& [key, slots] : f.segment_slots) {
    json arr = json::array();
    for (const auto& d : slots) arr.push_back(detail::distribution_to_json(d));
    segs[key] = std::move(arr);
  }
  j["segments"] = std::move(segs);
  return dump(j);
}

// --- traffic ---------------------------------------------------------------

inline std::vector<TrafficRecord> traffic_from_json(const json& j) {
  return detail::guarded("traffic", [&] {
    std::vector<TrafficRecord> out;
    for (const json& o : j.at("arrivals")) {
      TrafficRecord r{o.at("station_id").get<std::string>(), detail::seconds_field(o, "arrival_s"),
                      detail::seconds_field(o, "occupy_s")};
      if (r.arrival_s < 0 || r.occupy_s <= 0) throw ValidationError("traffic arrival with invalid times");
      out.push_back(std::move(r));
    }
    return out;
  });
}

inline std::vector<TrafficRecord> load_traffic(std::string_view text) {
  return traffic_from_json(detail::parse(text, kTrafficSchema));
}

inline std::string serialize_traffic(std::span<const TrafficRecord> records) {
  json j;
  j["schema"] = kTrafficSchema;
  j["arrivals"] = json::array();
  for (const auto& r : records)
    j["arrivals"].push_back({{"station_id", r.station_id}, {"arrival_s", r.arrival_s}, {"occupy_s", r.occupy_s}});
  return dump(j);
}

// --- plan ------------------------------------------------------------------

inline json request_to_json(const DeliveryRequest& r) {
  return {{"src", r.src}, {"dst", r.dst}, {"payload_kg", r.payload_kg}, {"start_time", r.start_time}};
}

inline std::string serialize_plan(const CompositionPlan& p) {
  json j;
  j["schema"] = kPlanSchema;
  j["cs_id"] = p.cs_id;
  j["drone_id"] = p.drone_id;
  j["request"] = request_to_json(p.request);
  j["legs"] = json::array();
  for (const DaaSLeg& l : p.legs) {
    json w = l.wind_state_used.expected
                 ? json{{"expected", true}}
                 : json{{"expected", false}, {"speed_kmh", l.wind_state_used.speed_kmh},
                        {"bearing_deg", l.wind_state_used.bearing_deg}};
    j["legs"].push_back({{"daas_id", l.daas_id},
                         {"from", l.from},
                         {"to", l.to},
                         {"depart", l.depart},
                         {"arrive", l.arrive},
                         {"wait_s", l.wait_s},
                         {"recharge_s", l.recharge_s},
                         {"wind_state_used", std::move(w)}});
  }
  j["total_time_s"] = p.total_time_s;
  return dump(j);
}

inline CompositionPlan load_plan(std::string_view text) {
  const json j = detail::parse(text, kPlanSchema);
  return detail::guarded("plan", [&] {
    CompositionPlan p;
    p.cs_id = j.at("cs_id").get<std::string>();
    p.drone_id = j.at("drone_id").get<std::string>();
    const json& r = j.at("request");
    p.request = {r.at("src").get<std::string>(), r.at("dst").get<std::string>(), detail::number_field(r, "payload_kg"),
                 detail::seconds_field(r, "start_time")};
    for (const json& o : j.at("legs")) {
      DaaSLeg l;
      l.daas_id = o.at("daas_id").get<std::string>();
      l.from = o.at("from").get<std::string>();
      l.to = o.at("to").get<std::string>();
      l.depart = detail::seconds_field(o, "depart");
      l.arrive = detail::seconds_field(o, "arrive");
      l.wait_s = detail::seconds_field(o, "wait_s");
      l.recharge_s = detail::seconds_field(o, "recharge_s");
      const json& w = o.at("wind_state_used");
      l.wind_state_used.expected = w.at("expected").get<bool>();
      if (!l.wind_state_used.expected) {
        l.wind_state_used.speed_kmh = detail::number_field(w, "speed_kmh");
        l.wind_state_used.bearing_deg = detail::number_field(w, "bearing_deg");
      }
      p.legs.push_back(std::move(l));
    }
    p.total_time_s = detail::seconds_field(j, "total_time_s");
    return p;
  });
}

}  // namespace skyroute::io
