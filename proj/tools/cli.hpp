#pragma once

// skyroute command-line front end: plan, replay, gen, bench.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "skyroute/skyroute.hpp"

namespace skyroute::cli {

enum ExitCode : int {
  kOk = 0,
  kNoComposition = 2,
  kCapExceeded = 3,
  kReplayInfeasible = 4,
  kUsage = 64,
  kDataError = 65,
  kIoError = 74,
};

struct Inputs {
  std::string network;
  std::string drones;
  std::string wind;
  std::string traffic;
  std::string plan;
  std::string src;
  std::string dst;
  double payload_kg = 0.5;
  Seconds start_s = 0;
  std::string algo = "pfs";
  int fs = 2;
  std::string heuristic = "flight";
  std::uint64_t seed = 1;
  std::size_t ies_cap = 14;
  double max_infeasible_prob = 0.2;
  double bg_rate_per_h = 0.0;
  double bg_occupy_min = 60.0;
  bool all_skyline = false;
  std::string out;
  // gen / bench
  std::vector<std::size_t> nodes{10};
  std::vector<std::string> algos{"pfs", "ies"};
  std::string topology = "grid";
  double spacing_km = 6.0;
  int pads = 5;
  bool deterministic_wind = false;
  std::string summary;
  bool omit_timing = false;
};

namespace detail {

inline Seconds occupy_seconds(const Inputs& in) { return static_cast<Seconds>(std::llround(in.bg_occupy_min * 60.0)); }

inline WindField load_wind_or_calm(const Inputs& in) {
  return in.wind.empty() ? WindField::calm() : io::load_wind(io::read_file(in.wind));
}

// Ground-truth traffic: the scripted file if given, else a Poisson
// realization drawn from the seed.
inline std::vector<TrafficRecord> truth_traffic(const SkywayNetwork& net, const Inputs& in) {
  if (!in.traffic.empty()) return io::load_traffic(io::read_file(in.traffic));
  std::vector<TrafficRecord> out;
  if (in.bg_rate_per_h <= 0.0) return out;
  for (const Station& st : net.stations()) {
    if (!st.recharge) continue;
    Rng rng(mix_seed(in.seed, fnv1a(st.id)));
    for (const auto& a : poisson_arrivals(in.bg_rate_per_h, occupy_seconds(in), 7 * 24 * 3600, rng))
      out.push_back({st.id, a.arrival_s, a.occupy_s});
  }
  return out;
}

inline void print_plan(std::ostream& out, const CompositionPlan& p) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-4s %-10s %-10s %10s %10s %8s %9s\n", "leg", "from", "to", "depart", "arrive",
                "wait_s", "recharge");
  out << buf;
  for (std::size_t k = 0; k < p.legs.size(); ++k) {
    const auto& l = p.legs[k];
    std::snprintf(buf, sizeof buf, "%-4zu %-10s %-10s %10lld %10lld %8lld %9lld\n", k, l.from.c_str(), l.to.c_str(),
                  static_cast<long long>(l.depart), static_cast<long long>(l.arrive), static_cast<long long>(l.wait_s),
                  static_cast<long long>(l.recharge_s));
    out << buf;
  }
  out << "drone " << p.drone_id << ", total " << p.total_time_s << " s\n";
}

inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::write_file(path, text);
  }
}

inline SearchConfig search_config(const Inputs& in) {
  SearchConfig cfg;
  cfg.fs = in.fs;
  cfg.heuristic = in.heuristic == "flight-recharge" ? Heuristic::flight_and_recharge : Heuristic::flight_time;
  cfg.max_infeasible_prob = in.max_infeasible_prob;
  cfg.ies_cap = in.ies_cap;
  return cfg;
}

inline int cmd_plan(const Inputs& in, std::ostream& out) {
  const SkywayNetwork net = io::load_network(io::read_file(in.network));
  const auto fleet = io::load_drones(io::read_file(in.drones));
  const WindField field = load_wind_or_calm(in);
  const BoundWind wind(net, field);
  const DeliveryRequest req{in.src, in.dst, in.payload_kg, in.start_s};
  req.validate();
  net.require(in.src);
  net.require(in.dst);
  const SearchConfig cfg = search_config(in);

  CompositionPlan plan;
  if (in.algo == "ies") {
    const TrafficSchedules traffic(net, truth_traffic(net, in));
    const WindTruth truth_wind(wind, in.seed);
    const Drone drone = pick_drone(bnl_skyline(fleet, in.payload_kg));
    plan = ies_compose(net, GroundTruth{truth_wind, traffic}, drone, req, in.ies_cap);
  } else if (!in.traffic.empty() || in.bg_rate_per_h <= 0.0) {
    const TrafficSchedules traffic(net, in.traffic.empty() ? std::vector<TrafficRecord>{}
                                                           : io::load_traffic(io::read_file(in.traffic)));
    plan = plan_delivery(net, wind, traffic, fleet, req, cfg, in.all_skyline);
  } else {
    const PoissonWaitModel model(net, in.bg_rate_per_h, occupy_seconds(in));
    plan = plan_delivery(net, wind, model, fleet, req, cfg, in.all_skyline);
  }
  print_plan(out, plan);
  if (!in.out.empty()) io::write_file(in.out, io::serialize_plan(plan));
  return kOk;
}

inline int cmd_replay(const Inputs& in, std::ostream& out) {
  const SkywayNetwork net = io::load_network(io::read_file(in.network));
  const auto fleet = io::load_drones(io::read_file(in.drones));
  const CompositionPlan plan = io::load_plan(io::read_file(in.plan));
  const WindField field = load_wind_or_calm(in);
  const BoundWind wind(net, field);
  const TrafficSchedules traffic(net, truth_traffic(net, in));
  const WindTruth truth_wind(wind, in.seed);

  const auto it = std::find_if(fleet.begin(), fleet.end(), [&plan](const Drone& d) { return d.id == plan.drone_id; });
  if (it == fleet.end()) throw ValidationError("plan drone '" + plan.drone_id + "' is not in the fleet");
  const auto stations = plan.stations();
  const auto result = replay(net, std::span<const std::string>(stations), *it, plan.request,
                             GroundTruth{truth_wind, traffic});
  if (const auto* f = std::get_if<InfeasibleAt>(&result)) {
    out << "InfeasibleAt leg " << f->leg << " (" << to_string(f->cause) << "): " << f->detail << "\n";
    return kReplayInfeasible;
  }
  const auto& replayed = std::get<CompositionPlan>(result);
  print_plan(out, replayed);
  if (!in.out.empty()) io::write_file(in.out, io::serialize_plan(replayed));
  return kOk;
}

inline bench::ScenarioSpec scenario_spec(const Inputs& in) {
  bench::ScenarioSpec spec;
  spec.node_count = in.nodes.empty() ? 10 : in.nodes.front();
  spec.topology = bench::parse_topology(in.topology);
  spec.spacing_km = in.spacing_km;
  spec.pads_per_station = in.pads;
  spec.deterministic_wind = in.deterministic_wind;
  spec.bg_rate_per_h = in.bg_rate_per_h;
  spec.bg_occupy_min = in.bg_occupy_min;
  spec.seed = in.seed;
  return spec;
}

inline int cmd_gen(const Inputs& in, std::ostream& out) {
  if (in.out.empty()) throw CLI::ValidationError("--out", "gen needs an output directory");
  const auto sc = bench::generate_scenario(scenario_spec(in));
  bench::write_scenario(in.out, sc);
  out << "wrote " << sc.network.size() << " stations, " << sc.network.segments().size() << " segments, "
      << sc.traffic.size() << " background arrivals, " << sc.drones.size() << " drones to " << in.out << "\n";
  return kOk;
}

inline int cmd_bench(const Inputs& in, std::ostream& out) {
  bench::ExperimentSpec spec;
  spec.node_counts = in.nodes;
  spec.algos.clear();
  for (const auto& a : in.algos) spec.algos.push_back(bench::parse_algo(a));
  spec.scenario = scenario_spec(in);
  spec.search = search_config(in);
  spec.payload_kg = in.payload_kg;
  spec.start_time = in.start_s;
  spec.seed = in.seed;
  spec.record_timing = !in.omit_timing;
  const auto result = bench::run_experiment(spec);
  emit(in.out, bench::runs_csv(result), out);
  const std::string summary = bench::summary_csv(result);
  if (!in.summary.empty()) {
    io::write_file(in.summary, summary);
  } else if (!in.out.empty() && in.out != "-") {
    out << summary;
  }
  return kOk;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"skyroute: drone delivery composition over skyway networks"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "print help for every subcommand");
  Inputs in;

  auto add_request_flags = [&in](CLI::App* c) {
    c->add_option("--network", in.network, "skyroute-network/1 file")->required()->check(CLI::ExistingFile);
    c->add_option("--drones", in.drones, "skyroute-drones/1 file")->required()->check(CLI::ExistingFile);
    c->add_option("--wind", in.wind, "skyroute-wind/1 file (default: calm)")->check(CLI::ExistingFile);
    c->add_option("--traffic", in.traffic, "skyroute-traffic/1 scripted arrivals")->check(CLI::ExistingFile);
  };
  auto add_traffic_flags = [&in](CLI::App* c) {
    c->add_option("--bg-rate-per-h", in.bg_rate_per_h, "Poisson background arrivals per station per hour")
        ->check(CLI::NonNegativeNumber);
    c->add_option("--bg-occupy-min", in.bg_occupy_min, "pad occupancy of each background arrival, minutes")
        ->check(CLI::PositiveNumber);
    c->add_option("--seed", in.seed, "random seed for ground-truth weather and traffic");
  };
  auto add_search_flags = [&in](CLI::App* c) {
    c->add_option("--fs", in.fs, "forward-search depth")->check(CLI::Range(1, 16));
    c->add_option("--heuristic", in.heuristic, "remaining-cost estimate: flight or flight-recharge")
        ->check(CLI::IsMember({"flight", "flight-recharge"}));
    c->add_option("--ies-cap", in.ies_cap, "largest network the exhaustive search accepts")->check(CLI::PositiveNumber);
    c->add_option("--max-infeasible-prob", in.max_infeasible_prob, "reject segments more likely than this to be unflyable")
        ->check(CLI::Range(0.0, 1.0));
  };

  CLI::App* plan = app.add_subcommand("plan", "compose a delivery plan");
  add_request_flags(plan);
  plan->add_option("--src", in.src, "source station id")->required();
  plan->add_option("--dst", in.dst, "destination station id")->required();
  plan->add_option("--payload-kg", in.payload_kg, "package weight, kg")->required()->check(CLI::PositiveNumber);
  plan->add_option("--start-s", in.start_s, "start time, seconds from epoch")->check(CLI::NonNegativeNumber);
  plan->add_option("--algo", in.algo, "pfs or ies")->check(CLI::IsMember({"pfs", "ies"}));
  add_search_flags(plan);
  add_traffic_flags(plan);
  plan->add_flag("--all-skyline", in.all_skyline, "plan with every skyline drone and keep the fastest");
  plan->add_option("--out", in.out, "write the skyroute-plan/1 file here");

  CLI::App* rep = app.add_subcommand("replay", "replay a plan against ground truth");
  add_request_flags(rep);
  rep->add_option("--plan", in.plan, "skyroute-plan/1 file")->required()->check(CLI::ExistingFile);
  add_traffic_flags(rep);
  rep->add_option("--out", in.out, "write the replayed plan here");

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic scenario");
  gen->add_option("--nodes", in.nodes, "station count")->expected(1);
  gen->add_option("--topology", in.topology, "grid or random-geometric");
  gen->add_option("--spacing-km", in.spacing_km, "station spacing, km")->check(CLI::PositiveNumber);
  gen->add_option("--pads", in.pads, "pads per station")->check(CLI::PositiveNumber);
  gen->add_flag("--deterministic-wind", in.deterministic_wind, "one wind outcome per slot");
  add_traffic_flags(gen);
  gen->add_option("--out", in.out, "output directory")->required();

  CLI::App* bnc = app.add_subcommand("bench", "run the execution/delivery time experiments");
  bnc->add_option("--nodes", in.nodes, "node counts, comma separated")->delimiter(',');
  bnc->add_option("--algo", in.algos, "algorithms, comma separated")->delimiter(',');
  bnc->add_option("--topology", in.topology, "grid or random-geometric");
  bnc->add_option("--spacing-km", in.spacing_km, "station spacing, km")->check(CLI::PositiveNumber);
  bnc->add_option("--pads", in.pads, "pads per station")->check(CLI::PositiveNumber);
  bnc->add_flag("--deterministic-wind", in.deterministic_wind, "one wind outcome per slot");
  bnc->add_option("--payload-kg", in.payload_kg, "package weight, kg")->check(CLI::PositiveNumber);
  bnc->add_option("--start-s", in.start_s, "start time, seconds from epoch")->check(CLI::NonNegativeNumber);
  add_search_flags(bnc);
  add_traffic_flags(bnc);
  bnc->add_flag("--omit-timing", in.omit_timing, "write 0 for exec_time_ns (byte-stable output)");
  bnc->add_option("--out", in.out, "runs CSV (default: stdout)");
  bnc->add_option("--summary", in.summary, "aggregate CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (plan->parsed()) return detail::cmd_plan(in, out);
    if (rep->parsed()) return detail::cmd_replay(in, out);
    if (gen->parsed()) return detail::cmd_gen(in, out);
    return detail::cmd_bench(in, out);
  } catch (const NoComposition& e) {
    err << "no composition: " << e.what() << "\n";
    return kNoComposition;
  } catch (const NoCapableDrone& e) {
    err << "no capable drone: " << e.what() << "\n";
    return kNoComposition;
  } catch (const OverPayload& e) {
    err << "over payload: " << e.what() << "\n";
    return kNoComposition;
  } catch (const CapExceeded& e) {
    err << "cap exceeded: " << e.what() << "\n";
    return kCapExceeded;
  } catch (const CLI::ValidationError& e) {
    err << e.what() << "\n";
    return kUsage;
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kDataError;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kDataError;
  } catch (const bench::InvalidSpec& e) {
    err << "invalid scenario: " << e.what() << "\n";
    return kDataError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
}

}  // namespace skyroute::cli
