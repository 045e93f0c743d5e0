#pragma once

// Synthetic scenario generation and the execution-time / delivery-time
// experiments comparing PFS with the exhaustive baseline.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "skyroute/congestion.hpp"
#include "skyroute/io.hpp"
#include "skyroute/model.hpp"
#include "skyroute/plan.hpp"
#include "skyroute/rng.hpp"
#include "skyroute/select.hpp"
#include "skyroute/wind.hpp"

namespace skyroute::bench {

enum class Topology { grid, random_geometric };

inline const char* to_string(Topology t) { return t == Topology::grid ? "grid" : "random-geometric"; }

inline Topology parse_topology(const std::string& s) {
  if (s == "grid") return Topology::grid;
  if (s == "random-geometric" || s == "rgg") return Topology::random_geometric;
  throw ValidationError("unknown topology '" + s + "'");
}

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

/// DJI Matrice 200 V2 reference profile.
inline Drone dji_m200_v2() {
  Drone d;
  d.id = "dji-m200-v2";
  d.provider = "dji";
  d.max_payload_kg = 1.45;
  d.max_flight_time_min = 24.0;
  d.air_speed_kmh = 81.0;
  d.max_range_km = 32.4;
  d.full_recharge_min = 134.4;  // 2.24 h
  d.payload_derate = 0.7;
  return d;
}

struct ScenarioSpec {
  std::size_t node_count = 10;
  Topology topology = Topology::grid;
  double spacing_km = 6.0;  // grid pitch; mean nearest-neighbour scale for random layouts
  double link_radius = 1.2;  // random-geometric link radius, in units of spacing_km
  int pads_per_station = 5;
  LatLon origin{-33.8688, 151.2093};

  double wind_max_kmh = 30.0;
  Seconds slot_len_s = 900;
  int wind_slots = 96;
  int wind_outcomes = 3;
  double gusty_fraction = 0.2;  // share of links with their own, stronger wind
  bool deterministic_wind = false;

  double bg_rate_per_h = 0.0;
  double bg_occupy_min = 60.0;
  Seconds traffic_horizon_s = 7 * 24 * 3600;

  int fleet_size = 6;
  std::uint64_t seed = 1;

  void validate() const {
    if (node_count < 2) throw InvalidSpec("node_count must be >= 2");
    if (!(spacing_km > 0.0)) throw InvalidSpec("spacing_km must be > 0");
    if (!(link_radius >= 1.0)) throw InvalidSpec("link_radius must be >= 1");
    if (pads_per_station < 1) throw InvalidSpec("pads_per_station must be >= 1");
    if (wind_max_kmh < 0.0 || slot_len_s <= 0 || wind_slots < 1 || wind_outcomes < 1)
      throw InvalidSpec("invalid wind regime");
    if (!(gusty_fraction >= 0.0 && gusty_fraction <= 1.0)) throw InvalidSpec("gusty_fraction must be in [0, 1]");
    if (bg_rate_per_h < 0.0 || !(bg_occupy_min > 0.0)) throw InvalidSpec("invalid background traffic");
    if (fleet_size < 1) throw InvalidSpec("fleet_size must be >= 1");
  }
};

struct Scenario {
  SkywayNetwork network;
  WindField wind;
  std::vector<TrafficRecord> traffic;
  std::vector<Drone> drones;
};

namespace detail {

inline LatLon offset(LatLon origin, double east_km, double north_km) {
  const double km_per_deg = kEarthRadiusKm * std::numbers::pi / 180.0;
  return {origin.lat + north_km / km_per_deg, origin.lon + east_km / (km_per_deg * std::cos(deg2rad(origin.lat)))};
}

inline std::string station_id(std::size_t i, std::size_t n) {
  const int width = std::max<int>(3, static_cast<int>(std::to_string(n - 1).size()));
  std::string digits = std::to_string(i);
  return "S" + std::string(static_cast<std::size_t>(width) - std::min<std::size_t>(digits.size(), width), '0') + digits;
}

inline double round_to(double v, double step) { return std::round(v / step) * step; }

using Links = std::vector<std::pair<std::string, std::string>>;

inline Links grid_links(const ScenarioSpec& spec, std::vector<Station>& stations) {
  const std::size_t n = spec.node_count;
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  Links links;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = i / cols, c = i % cols;
    stations[i].position = offset(spec.origin, static_cast<double>(c) * spec.spacing_km,
                                  -static_cast<double>(r) * spec.spacing_km);
    if (c + 1 < cols && i + 1 < n) links.emplace_back(stations[i].id, stations[i + 1].id);
    if (i + cols < n) links.emplace_back(stations[i].id, stations[i + cols].id);
  }
  return links;
}

inline Links random_geometric_links(const ScenarioSpec& spec, std::vector<Station>& stations, Rng& rng) {
  const std::size_t n = spec.node_count;
  const double side = spec.spacing_km * std::sqrt(static_cast<double>(n));
  std::vector<std::pair<double, double>> xy(n);
  for (auto& p : xy) p = {uniform(rng, 0.0, side), uniform(rng, 0.0, side)};
  for (std::size_t i = 0; i < n; ++i) stations[i].position = offset(spec.origin, xy[i].first, -xy[i].second);

  const double radius = spec.link_radius * spec.spacing_km;
  auto dist = [&xy](std::size_t a, std::size_t b) { return std::hypot(xy[a].first - xy[b].first, xy[a].second - xy[b].second); };
  Links links;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (dist(a, b) <= radius) {
        links.emplace_back(stations[a].id, stations[b].id);
        parent[find(a)] = find(b);
      }
  // Join components through their closest pair until one remains.
  for (;;) {
    const std::size_t root = find(0);
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < n; ++a) {
      if (find(a) != root) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if (find(b) == root) continue;
        if (const double d = dist(a, b); d < best) {
          best = d;
          ba = a;
          bb = b;
        }
      }
    }
    if (std::isinf(best)) break;
    links.emplace_back(stations[ba].id, stations[bb].id);
    parent[find(bb)] = root;
  }
  return links;
}

inline WindDistribution random_distribution(Rng& rng, int outcomes, double max_kmh, double prevailing_deg) {
  WindDistribution d;
  double total = 0.0;
  for (int k = 0; k < outcomes; ++k) {
    WindOutcome o;
    o.state.speed_kmh = round_to(uniform(rng, 0.0, max_kmh), 0.1);
    o.state.bearing_deg = normalize_bearing(round_to(prevailing_deg + uniform(rng, -60.0, 60.0), 1.0));
    o.p = 0.2 + uniform01(rng);
    total += o.p;
    d.outcomes.push_back(o);
  }
  double assigned = 0.0;
  for (std::size_t k = 0; k + 1 < d.outcomes.size(); ++k) {
    d.outcomes[k].p = round_to(d.outcomes[k].p / total, 1e-6);
    assigned += d.outcomes[k].p;
  }
  d.outcomes.back().p = 1.0 - assigned;
  return d;
}

}  // namespace detail

/// Builds a network, wind field, background traffic and drone fleet. The
/// result depends only on the spec (including its seed).
inline Scenario generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(mix_seed(spec.seed, 0x5ce7a210ULL));
  const std::size_t n = spec.node_count;

  std::vector<Station> stations(n);
  for (std::size_t i = 0; i < n; ++i) {
    stations[i].id = detail::station_id(i, n);
    stations[i].pads = spec.pads_per_station;
  }
  const auto links = spec.topology == Topology::grid ? detail::grid_links(spec, stations)
                                                     : detail::random_geometric_links(spec, stations, rng);
  Scenario sc;
  sc.network = SkywayNetwork::build(std::move(stations), links);

  const Drone reference = dji_m200_v2();
  std::vector<double> lengths;
  for (const auto& s : sc.network.segments()) lengths.push_back(s.distance_km);
  std::nth_element(lengths.begin(), lengths.begin() + lengths.size() / 2, lengths.end());
  if (lengths[lengths.size() / 2] > reference.max_range_km)
    throw InvalidSpec("median segment exceeds the reference drone's calm range");

  // Wind: regional per-slot distributions plus stronger per-link overrides.
  sc.wind.slot_len_s = spec.slot_len_s;
  const double prevailing = uniform(rng, 0.0, 360.0);
  Rng wind_rng(mix_seed(spec.seed, 0x3171dULL));
  const int outcomes = spec.deterministic_wind ? 1 : spec.wind_outcomes;
  for (int k = 0; k < spec.wind_slots; ++k) {
    const double drift = prevailing + 15.0 * std::sin(2.0 * std::numbers::pi * k / spec.wind_slots);
    sc.wind.default_slots.push_back(detail::random_distribution(wind_rng, outcomes, spec.wind_max_kmh, drift));
  }
  for (const Segment& s : sc.network.segments()) {
    if (s.from > s.to) continue;
    if (uniform01(wind_rng) >= spec.gusty_fraction) continue;
    std::vector<WindDistribution> slots;
    for (int k = 0; k < spec.wind_slots; ++k)
      slots.push_back(detail::random_distribution(wind_rng, outcomes, 2.0 * spec.wind_max_kmh, uniform(wind_rng, 0.0, 360.0)));
    const auto& a = sc.network.station(s.from).id;
    const auto& b = sc.network.station(s.to).id;
    sc.wind.segment_slots[segment_key(a, b)] = slots;
    sc.wind.segment_slots[segment_key(b, a)] = std::move(slots);
  }

  // Background traffic: one Poisson realization per recharge station.
  const auto occupy = static_cast<Seconds>(std::llround(spec.bg_occupy_min * 60.0));
  for (const Station& st : sc.network.stations()) {
    if (!st.recharge) continue;
    Rng traffic_rng(mix_seed(spec.seed, fnv1a(st.id)));
    for (const auto& a : poisson_arrivals(spec.bg_rate_per_h, occupy, spec.traffic_horizon_s, traffic_rng))
      sc.traffic.push_back({st.id, a.arrival_s, a.occupy_s});
  }

  // Fleet: the reference profile plus perturbed variants from other providers.
  sc.drones.push_back(reference);
  Rng fleet_rng(mix_seed(spec.seed, 0xf1ee7ULL));
  for (int k = 1; k < spec.fleet_size; ++k) {
    Drone d;
    d.id = "variant-" + std::to_string(k);
    d.provider = "provider-" + std::to_string(1 + k % 3);
    d.max_payload_kg = detail::round_to(reference.max_payload_kg * uniform(fleet_rng, 0.7, 1.4), 0.01);
    d.air_speed_kmh = detail::round_to(reference.air_speed_kmh * uniform(fleet_rng, 0.8, 1.2), 0.1);
    d.max_flight_time_min = detail::round_to(reference.max_flight_time_min * uniform(fleet_rng, 0.8, 1.25), 0.1);
    d.full_recharge_min = detail::round_to(reference.full_recharge_min * uniform(fleet_rng, 0.7, 1.3), 0.1);
    d.payload_derate = detail::round_to(uniform(fleet_rng, 0.6, 0.85), 0.01);
    d.max_range_km = detail::round_to(d.air_speed_kmh * d.max_flight_time_min / 60.0, 0.001);
    d.validate();
    sc.drones.push_back(d);
  }
  return sc;
}

/// Writes network.json, wind.json, traffic.json and drones.json into `dir`.
inline void write_scenario(const std::filesystem::path& dir, const Scenario& sc) {
  std::filesystem::create_directories(dir);
  io::write_file((dir / "network.json").string(), io::serialize_network(sc.network));
  io::write_file((dir / "wind.json").string(), io::serialize_wind(sc.wind));
  io::write_file((dir / "traffic.json").string(), io::serialize_traffic(sc.traffic));
  io::write_file((dir / "drones.json").string(), io::serialize_drones(sc.drones));
}

enum class Algo { pfs, ies };

inline const char* to_string(Algo a) { return a == Algo::pfs ? "pfs" : "ies"; }

inline Algo parse_algo(const std::string& s) {
  if (s == "pfs") return Algo::pfs;
  if (s == "ies") return Algo::ies;
  throw ValidationError("unknown algorithm '" + s + "'");
}

struct ExperimentSpec {
  std::vector<std::size_t> node_counts{10};
  std::vector<Algo> algos{Algo::pfs, Algo::ies};
  ScenarioSpec scenario;
  SearchConfig search;
  double payload_kg = 0.5;
  Seconds start_time = 0;
  std::uint64_t seed = 1;
  bool record_timing = true;
};

struct RunRecord {
  std::size_t node_count = 0;
  Algo algo = Algo::pfs;
  std::size_t run_index = 0;
  std::string src;
  std::string dst;
  Seconds delivery_time_s = 0;
  std::int64_t exec_time_ns = 0;
  std::size_t legs = 0;
  std::string outcome;
  std::size_t segment_evaluations = 0;
  std::vector<std::string> stations;
};

struct Aggregate {
  std::size_t node_count = 0;
  Algo algo = Algo::pfs;
  std::size_t runs = 0;
  std::size_t ok = 0;
  double mean_delivery_s = 0.0;
  double median_delivery_s = 0.0;
  double mean_exec_ns = 0.0;
  double median_exec_ns = 0.0;
};

struct ExperimentResult {
  std::vector<RunRecord> runs;
  std::vector<Aggregate> aggregates;

  const Aggregate* find(std::size_t n, Algo a) const {
    for (const auto& g : aggregates)
      if (g.node_count == n && g.algo == a) return &g;
    return nullptr;
  }
};

inline std::size_t runs_for(std::size_t node_count) { return (node_count + 1) / 2; }

/// Distinct ordered (src, dst) pairs, src != dst, drawn uniformly.
inline std::vector<std::pair<StationIndex, StationIndex>> draw_pairs(const SkywayNetwork& net, std::size_t count, Rng& rng) {
  std::vector<StationIndex> sources, dests;
  for (StationIndex i = 0; i < net.size(); ++i) {
    if (net.station(i).source) sources.push_back(i);
    if (net.station(i).destination) dests.push_back(i);
  }
  std::set<std::pair<StationIndex, StationIndex>> seen;
  std::vector<std::pair<StationIndex, StationIndex>> out;
  std::size_t attempts = 0;
  while (out.size() < count && attempts++ < 1000 * count + 1000) {
    const StationIndex s = sources[uniform_index(rng, sources.size())];
    const StationIndex d = dests[uniform_index(rng, dests.size())];
    if (s == d || !seen.insert({s, d}).second) continue;
    out.emplace_back(s, d);
  }
  return out;
}

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <class F>
std::int64_t timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
}

inline std::vector<Aggregate> aggregate(const std::vector<RunRecord>& runs) {
  std::vector<Aggregate> out;
  for (const RunRecord& r : runs) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&r](const Aggregate& g) { return g.node_count == r.node_count && g.algo == r.algo; });
    if (it == out.end()) {
      out.push_back({r.node_count, r.algo});
      it = out.end() - 1;
    }
    ++it->runs;
  }
  for (Aggregate& g : out) {
    std::vector<double> delivery, exec;
    for (const RunRecord& r : runs) {
      if (r.node_count != g.node_count || r.algo != g.algo) continue;
      exec.push_back(static_cast<double>(r.exec_time_ns));
      if (r.outcome == "ok") delivery.push_back(static_cast<double>(r.delivery_time_s));
    }
    g.ok = delivery.size();
    g.mean_delivery_s = delivery.empty() ? 0.0 : std::accumulate(delivery.begin(), delivery.end(), 0.0) / delivery.size();
    g.median_delivery_s = median(delivery);
    g.mean_exec_ns = exec.empty() ? 0.0 : std::accumulate(exec.begin(), exec.end(), 0.0) / exec.size();
    g.median_exec_ns = median(exec);
  }
  return out;
}

}  // namespace detail

/// One planner run: compose, then replay the plan under ground truth.
inline RunRecord run_once(const Scenario& sc, const BoundWind& wind, const TrafficSchedules& truth_traffic,
                          const PoissonWaitModel* poisson, const Drone& drone, const DeliveryRequest& req, Algo algo,
                          const SearchConfig& cfg, std::uint64_t weather_seed, bool record_timing) {
  RunRecord rec;
  rec.algo = algo;
  rec.src = req.src;
  rec.dst = req.dst;
  const WindTruth truth_wind(wind, weather_seed);
  const GroundTruth truth{truth_wind, truth_traffic};
  std::optional<CompositionPlan> plan;
  SearchStats stats;
  try {
    const std::int64_t ns = detail::timed([&] {
      if (algo == Algo::ies) {
        plan = ies_compose(sc.network, truth, drone, req, cfg.ies_cap, &stats);
      } else if (poisson != nullptr) {
        plan = pfs_compose(sc.network, wind, *poisson, drone, req, cfg, &stats);
      } else {
        plan = pfs_compose(sc.network, wind, truth_traffic, drone, req, cfg, &stats);
      }
    });
    rec.exec_time_ns = record_timing ? ns : 0;
  } catch (const NoComposition&) {
    rec.outcome = "no-composition";
  } catch (const CapExceeded&) {
    rec.outcome = "cap-exceeded";
  } catch (const OverPayload&) {
    rec.outcome = "over-payload";
  }
  rec.segment_evaluations = stats.segment_evaluations;
  if (!plan) return rec;

  const auto stations = plan->stations();
  const auto replayed = replay(sc.network, std::span<const std::string>(stations), drone, req, truth);
  rec.stations = stations;
  rec.legs = plan->legs.size();
  if (const auto* p = std::get_if<CompositionPlan>(&replayed)) {
    rec.delivery_time_s = p->total_time_s;
    rec.outcome = "ok";
  } else {
    const auto& f = std::get<InfeasibleAt>(replayed);
    rec.outcome = std::string("infeasible-") + skyroute::to_string(f.cause);
  }
  return rec;
}

/// For each node count: generate a scenario, draw ceil(n/2) random requests
/// and run every algorithm on each. Planner errors land in the outcome column.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  ExperimentResult result;
  for (std::size_t n : spec.node_counts) {
    ScenarioSpec sspec = spec.scenario;
    sspec.node_count = n;
    sspec.seed = mix_seed(spec.seed, n);
    const Scenario sc = generate_scenario(sspec);
    const BoundWind wind(sc.network, sc.wind);
    const TrafficSchedules traffic(sc.network, sc.traffic);
    std::optional<PoissonWaitModel> poisson;
    if (sspec.bg_rate_per_h > 0.0)
      poisson.emplace(sc.network, sspec.bg_rate_per_h, static_cast<Seconds>(std::llround(sspec.bg_occupy_min * 60.0)));

    Rng pair_rng(mix_seed(sspec.seed, 0x9a125ULL));
    const auto pairs = draw_pairs(sc.network, runs_for(n), pair_rng);
    std::optional<Drone> drone;
    std::string selection_error;
    try {
      drone = pick_drone(bnl_skyline(sc.drones, spec.payload_kg));
    } catch (const NoCapableDrone&) {
      selection_error = "no-capable-drone";
    }

    for (Algo algo : spec.algos) {
      if (algo == Algo::ies && n > spec.search.ies_cap) continue;
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        const DeliveryRequest req{sc.network.station(pairs[k].first).id, sc.network.station(pairs[k].second).id,
                                  spec.payload_kg, spec.start_time};
        RunRecord rec;
        if (drone) {
          rec = run_once(sc, wind, traffic, poisson ? &*poisson : nullptr, *drone, req, algo, spec.search,
                         mix_seed(sspec.seed, k), spec.record_timing);
        } else {
          rec.algo = algo;
          rec.src = req.src;
          rec.dst = req.dst;
          rec.outcome = selection_error;
        }
        rec.node_count = n;
        rec.run_index = k;
        result.runs.push_back(std::move(rec));
      }
    }
  }
  std::stable_sort(result.runs.begin(), result.runs.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.node_count, a.algo, a.run_index) < std::tie(b.node_count, b.algo, b.run_index);
  });
  result.aggregates = detail::aggregate(result.runs);
  return result;
}

inline std::string runs_csv(const ExperimentResult& r) {
  std::string out = "node_count,algo,run_index,src,dst,delivery_time_s,exec_time_ns,legs,outcome\n";
  for (const RunRecord& x : r.runs) {
    out += std::to_string(x.node_count) + "," + to_string(x.algo) + "," + std::to_string(x.run_index) + "," + x.src +
           "," + x.dst + "," + std::to_string(x.delivery_time_s) + "," + std::to_string(x.exec_time_ns) + "," +
           std::to_string(x.legs) + "," + x.outcome + "\n";
  }
  return out;
}

inline std::string summary_csv(const ExperimentResult& r) {
  std::string out = "node_count,algo,runs,ok,mean_delivery_s,median_delivery_s,mean_exec_ns,median_exec_ns\n";
  char buf[256];
  for (const Aggregate& g : r.aggregates) {
    std::snprintf(buf, sizeof buf, "%zu,%s,%zu,%zu,%.3f,%.3f,%.1f,%.1f\n", g.node_count, to_string(g.algo), g.runs, g.ok,
                  g.mean_delivery_s, g.median_delivery_s, g.mean_exec_ns, g.median_exec_ns);
    out += buf;
  }
  return out;
}

}  // namespace skyroute::bench
