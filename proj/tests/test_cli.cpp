#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "support.hpp"

using namespace skyroute;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "skyroute");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("skyroute_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Cli, HelpEnumeratesEveryFlag) {
  const auto plan = run({"plan", "--help"});
  const auto all = run({"--help-all"});
  EXPECT_EQ(plan.code, 0);
  for (const char* flag : {"--network", "--drones", "--wind", "--traffic", "--src", "--dst", "--payload-kg", "--start-s",
                           "--algo", "--fs", "--seed", "--ies-cap", "--max-infeasible-prob", "--bg-rate-per-h",
                           "--bg-occupy-min", "--all-skyline", "--out"}) {
    EXPECT_NE(plan.out.find(flag), std::string::npos) << flag;
    EXPECT_NE(all.out.find(flag), std::string::npos) << flag;
  }
  for (const char* cmd : {"plan", "replay", "gen", "bench"}) EXPECT_NE(all.out.find(cmd), std::string::npos);
}

TEST(Cli, PlanOnTwoNodeFixture) {
  const auto dir = scratch("plan");
  const auto r = run({"plan", "--network", fixture("two_node_network.json"), "--drones", fixture("drones_dji_m200_v2.json"),
                      "--src", "A", "--dst", "B", "--payload-kg", "1.0", "--out", (dir / "plan.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto plan = io::load_plan(io::read_file((dir / "plan.json").string()));
  EXPECT_EQ(plan.legs.size(), 1u);
}

TEST(Cli, OverweightPackageFailsWithNonzeroExit) {
  const auto r = run({"plan", "--network", fixture("two_node_network.json"), "--drones",
                      fixture("drones_dji_m200_v2.json"), "--src", "A", "--dst", "B", "--payload-kg", "3.0"});
  EXPECT_NE(r.code, 0);
  EXPECT_EQ(r.code, cli::kNoComposition);
}

TEST(Cli, UsageAndDataErrors) {
  EXPECT_EQ(run({"plan", "--network", fixture("two_node_network.json")}).code, cli::kUsage);
  EXPECT_EQ(run({"plan", "--network", fixture("calm_wind.json"), "--drones", fixture("drones_dji_m200_v2.json"), "--src",
                 "A", "--dst", "B", "--payload-kg", "1"})
                .code,
            cli::kDataError);
  EXPECT_EQ(run({"plan", "--network", fixture("two_node_network.json"), "--drones", fixture("drones_dji_m200_v2.json"),
                 "--src", "A", "--dst", "Q", "--payload-kg", "1"})
                .code,
            cli::kDataError);
}

TEST(Cli, PfsAndIesAgreeOnDiamond) {
  std::vector<std::string> base{"plan", "--network", fixture("diamond_network.json"), "--drones",
                                fixture("drones_dji_m200_v2.json"), "--wind", fixture("diamond_wind.json"),
                                "--src", "A", "--dst", "D", "--payload-kg", "0.5"};
  const auto dir = scratch("diamond");
  auto pfs = base, ies = base;
  pfs.insert(pfs.end(), {"--algo", "pfs", "--out", (dir / "pfs.json").string()});
  ies.insert(ies.end(), {"--algo", "ies", "--out", (dir / "ies.json").string()});
  ASSERT_EQ(run(pfs).code, 0);
  ASSERT_EQ(run(ies).code, 0);
  const auto a = io::load_plan(io::read_file((dir / "pfs.json").string()));
  const auto b = io::load_plan(io::read_file((dir / "ies.json").string()));
  EXPECT_EQ(a.stations(), b.stations());
  EXPECT_EQ(a.stations(), (std::vector<std::string>{"A", "C", "D"}));
}

TEST(Cli, IesCapExitCode) {
  const auto dir = scratch("cap");
  ASSERT_EQ(run({"gen", "--nodes", "20", "--out", dir.string()}).code, 0);
  const auto r = run({"plan", "--network", (dir / "network.json").string(), "--drones", (dir / "drones.json").string(),
                      "--src", "S000", "--dst", "S001", "--payload-kg", "0.5", "--algo", "ies"});
  EXPECT_EQ(r.code, cli::kCapExceeded);
}

TEST(Cli, GenIsDeterministic) {
  const auto a = scratch("gen_a"), b = scratch("gen_b");
  ASSERT_EQ(run({"gen", "--nodes", "12", "--topology", "random-geometric", "--seed", "5", "--bg-rate-per-h", "1",
                 "--out", a.string()})
                .code,
            0);
  ASSERT_EQ(run({"gen", "--nodes", "12", "--topology", "random-geometric", "--seed", "5", "--bg-rate-per-h", "1",
                 "--out", b.string()})
                .code,
            0);
  for (const char* f : {"network.json", "wind.json", "traffic.json", "drones.json"})
    EXPECT_EQ(io::read_file((a / f).string()), io::read_file((b / f).string())) << f;
}

TEST(Cli, BenchTenNodesBothAlgos) {
  const auto r = run({"bench", "--nodes", "10", "--algo", "pfs,ies", "--omit-timing"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "node_count,algo,run_index,src,dst,delivery_time_s,exec_time_ns,legs,outcome");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 10);
}

TEST(Cli, ReplayOfHandEditedPlanReportsFailingLeg) {
  // Plan A-B-C, then redirect the last leg to a station beyond one battery.
  const auto dir = scratch("replay");
  const std::string net_path = (dir / "net.json").string();
  io::write_file(net_path, R"({"schema":"skyroute-network/1","stations":[
    {"id":"A","lat":0,"lon":0,"pads":5,"recharge":true},
    {"id":"B","lat":0,"lon":0.1,"pads":5,"recharge":true},
    {"id":"C","lat":0,"lon":0.2,"pads":5,"recharge":true},
    {"id":"F","lat":0,"lon":0.5,"pads":5,"recharge":true}],
    "segments":[{"from":"A","to":"B"},{"from":"B","to":"C"},{"from":"C","to":"F"},{"from":"B","to":"F"}]})");
  const std::string plan_path = (dir / "plan.json").string();
  ASSERT_EQ(run({"plan", "--network", net_path, "--drones", fixture("drones_dji_m200_v2.json"), "--src", "A", "--dst",
                 "C", "--payload-kg", "0.5", "--out", plan_path})
                .code,
            0);
  ASSERT_EQ(run({"replay", "--network", net_path, "--drones", fixture("drones_dji_m200_v2.json"), "--plan", plan_path})
                .code,
            0);

  auto j = nlohmann::json::parse(io::read_file(plan_path));
  ASSERT_EQ(j["legs"].size(), 2u);
  j["legs"][1]["to"] = "F";
  j["request"]["dst"] = "F";
  io::write_file(plan_path, j.dump(2));
  const auto r =
      run({"replay", "--network", net_path, "--drones", fixture("drones_dji_m200_v2.json"), "--plan", plan_path});
  EXPECT_EQ(r.code, cli::kReplayInfeasible);
  EXPECT_NE(r.out.find("InfeasibleAt leg 1 (energy)"), std::string::npos) << r.out;
}
