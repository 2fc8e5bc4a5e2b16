#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "replan/bench.hpp"
#include "replan/errors.hpp"

using namespace replan;
namespace fs = std::filesystem;

namespace
{

const std::string kScenarioDir = REPLAN_SCENARIO_DIR;

const char* kMinimal = R"(name: tiny
dimension: 3
bounds: {lower: [-1, -1, -1], upper: [1, 1, 1]}
robot: {kind: point}
start: [-0.8, 0, 0]
goal: [0.8, 0, 0]
static_obstacles:
  - {center: [0, 0, 0], half_extents: [0.1, 0.3, 0.3]}
spawn_schedule:
  - {time: 0.4, side: 0.05, placement: robot_edge}
planning: {paths: 2, resolution: 0.01, steer: 0.3, initial_connect_time: 0.5, initial_optimize_time: 0.1}
budgets: {reduced_time: 0.05, relaxed_time: 0.1}
protocol: {trials: 2, seed: 9}
)";

std::string replace(std::string text, const std::string& from, const std::string& to)
{
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return text.replace(pos, from.size(), to);
}

std::size_t countLines(const fs::path& file)
{
  std::ifstream in(file);
  std::size_t n = 0;
  for(std::string line; std::getline(in, line);) n += !line.empty() && line[0] != '#';
  return n;
}

fs::path scratchDir(const std::string& name)
{
  const fs::path dir = fs::temp_directory_path() / ("replan_test_" + name);
  fs::remove_all(dir);
  return dir;
}

MetricsRecord record(ReplanMode mode, double delta, double time)
{
  MetricsRecord r;
  r.mode = mode;
  r.delta = delta;
  r.replan_time = time;
  return r;
}

}  // namespace

TEST(QualityIndex, Examples)
{
  EXPECT_DOUBLE_EQ(qualityIndex(10.0, 9.0), 10.0);
  EXPECT_DOUBLE_EQ(qualityIndex(10.0, 12.0), -20.0);
  EXPECT_DOUBLE_EQ(qualityIndex(2.0, 2.0), 0.0);
  EXPECT_THROW(qualityIndex(0.0, 1.0), ContractViolation);
  EXPECT_THROW(qualityIndex(kInfiniteCost, 1.0), ContractViolation);
  EXPECT_THROW(qualityIndex(1.0, std::nan("")), ContractViolation);
}

TEST(Aggregate, MatchesTwoPassStatistics)
{
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(2.0, 5.0);
  std::vector<MetricsRecord> records;
  std::vector<double> deltas;
  for(int k = 0; k < 200; ++k)
  {
    const ReplanMode mode = k % 3 == 0 ? ReplanMode::avoidance : ReplanMode::optimization;
    records.push_back(record(mode, n(rng), 0.01 * (k % 7)));
    if(mode == ReplanMode::avoidance) deltas.push_back(records.back().delta);
  }
  double mean = 0.0;
  for(double d : deltas) mean += d;
  mean /= deltas.size();
  double var = 0.0;
  for(double d : deltas) var += (d - mean) * (d - mean);
  var /= deltas.size() - 1;

  const AggregateTable t = aggregate(records);
  EXPECT_EQ(t.avoidance.count, deltas.size());
  EXPECT_EQ(t.avoidance.count + t.optimization.count, records.size());
  EXPECT_NEAR(t.avoidance.mean_delta, mean, 1e-9);
  EXPECT_NEAR(t.avoidance.std_delta, std::sqrt(var), 1e-9);

  std::shuffle(records.begin(), records.end(), rng);
  const AggregateTable s = aggregate(records);
  EXPECT_NEAR(s.avoidance.mean_delta, t.avoidance.mean_delta, 1e-9);
  EXPECT_NEAR(s.optimization.std_time, t.optimization.std_time, 1e-12);
}

TEST(Aggregate, SmallSamples)
{
  EXPECT_EQ(aggregate({}).avoidance.count, 0u);
  const AggregateTable one = aggregate({record(ReplanMode::avoidance, -4.0, 0.02)});
  EXPECT_EQ(one.avoidance.count, 1u);
  EXPECT_DOUBLE_EQ(one.avoidance.mean_delta, -4.0);
  EXPECT_TRUE(std::isnan(one.avoidance.std_delta));
  const std::string text = renderTable(one, "t");
  EXPECT_NE(text.find("Obstacle avoidance"), std::string::npos);
  EXPECT_NE(text.find("Path optimization"), std::string::npos);
}

TEST(Metrics, JsonRoundTrip)
{
  MetricsRecord r = record(ReplanMode::avoidance, -3.5, 0.042);
  r.trial = 4;
  r.replan_id = 17;
  r.length_cur = 2.0;
  r.length_rp = 2.07;
  r.timestamp = 1.23;
  std::stringstream ss;
  writeMetrics({r, r}, ss);
  const auto back = readMetrics(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].toJson(), r.toJson());
  EXPECT_DOUBLE_EQ(r.toJson()["replan_time_ms"].get<double>(), 42.0);
}

TEST(Scenario, LoadsScene3d)
{
  const Scenario s = loadScenario(kScenarioDir + "/scene3d.yaml");
  EXPECT_EQ(s.dimension, 3);
  EXPECT_EQ(s.spawns.size(), 3u);
  const double times[] = {0.5, 1.0, 1.5};
  for(std::size_t k = 0; k < 3; ++k)
  {
    EXPECT_DOUBLE_EQ(s.spawns[k].time, times[k]);
    EXPECT_DOUBLE_EQ(s.spawns[k].side, 0.05);
  }
  EXPECT_EQ(s.spawns[1].placement, SpawnPlacement::robot_edge);
  EXPECT_DOUBLE_EQ(s.execution.reduced_time, 0.05);
  EXPECT_DOUBLE_EQ(s.execution.relaxed_time, 0.1);
  EXPECT_EQ(s.trials, 30u);
  EXPECT_TRUE(s.warnings.empty());
}

TEST(Scenario, LoadsCell6d)
{
  const Scenario s = loadScenario(kScenarioDir + "/cell6d.yaml");
  EXPECT_EQ(s.dimension, 6);
  EXPECT_EQ(s.robot.kind(), RobotModel::Kind::serial_chain);
  EXPECT_GT(s.execution.padding, 0.0);
  EXPECT_LT(s.execution.monitor_padding, s.execution.padding);
}

TEST(Scenario, MissingBudgetsFallBackWithWarning)
{
  const Scenario s = parseScenario(replace(kMinimal, "budgets: {reduced_time: 0.05, relaxed_time: 0.1}\n", ""));
  EXPECT_DOUBLE_EQ(s.execution.reduced_time, 0.05);
  EXPECT_DOUBLE_EQ(s.execution.relaxed_time, 0.1);
  ASSERT_FALSE(s.warnings.empty());
}

TEST(Scenario, RejectsInvalidFiles)
{
  EXPECT_NO_THROW(parseScenario(kMinimal));
  // Start inside the static obstacle.
  EXPECT_THROW(parseScenario(replace(kMinimal, "start: [-0.8, 0, 0]", "start: [0, 0, 0]")), ScenarioError);
  // Budgets out of order.
  EXPECT_THROW(parseScenario(replace(kMinimal, "reduced_time: 0.05", "reduced_time: 0.2")), ScenarioError);
  // Spawn after the time limit.
  EXPECT_THROW(parseScenario(replace(kMinimal, "time: 0.4", "time: 40")), ScenarioError);
  EXPECT_THROW(parseScenario(replace(kMinimal, "paths: 2", "paths: 1")), ScenarioError);
  EXPECT_THROW(loadScenario("/nonexistent/scenario.yaml"), ScenarioError);
  try
  {
    parseScenario(replace(kMinimal, "robot: {kind: point}", "robot: {kind: point, colour: red}"), "x.yaml");
    FAIL() << "unknown key accepted";
  }
  catch(const ScenarioError& e)
  {
    EXPECT_NE(std::string(e.what()).find("x.yaml:4"), std::string::npos) << e.what();
  }
}

TEST(Protocol, ExportsDumpsPerSwap)
{
  const Scenario s = parseScenario(kMinimal);
  const TrialResult t = runTrial(s, 0, s.seed);
  ASSERT_FALSE(t.skipped) << t.skip_reason;
  const fs::path dir = scratchDir("export");
  exportPaths(t.episode.log, dir);

  for(std::size_t k = 0; k < s.planning.paths; ++k)
    EXPECT_TRUE(fs::exists(dir / "initial_paths" / ("path_" + std::to_string(k) + ".txt")));
  const std::size_t swaps = t.episode.log.ofType("swap").size();
  std::size_t files = 0;
  if(fs::exists(dir / "replans"))
    for([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "replans")) ++files;
  EXPECT_EQ(files, swaps);
  EXPECT_EQ(t.records.size(), swaps);
  EXPECT_EQ(countLines(dir / "obstacles.txt"), t.episode.log.ofType("obstacle").size());
  const double lines = static_cast<double>(countLines(dir / "traversed.txt"));
  EXPECT_NEAR(lines, t.episode.end_time * 100.0 + 1.0, 1.0);
  fs::remove_all(dir);
}

TEST(Protocol, EmptyLogExportsNoTrajectory)
{
  const fs::path dir = scratchDir("empty");
  exportPaths(EpisodeLog{}, dir);
  EXPECT_TRUE(fs::exists(dir / "obstacles.txt"));
  EXPECT_FALSE(fs::exists(dir / "traversed.txt"));
  EXPECT_FALSE(fs::exists(dir / "replans"));
  fs::remove_all(dir);
}

TEST(Protocol, ZeroTrialsGivesEmptyTable)
{
  const Scenario s = parseScenario(kMinimal);
  ProtocolOptions o;
  o.trials = 0;
  const ProtocolResult r = runProtocol(s, o);
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.table.avoidance.count, 0u);
  EXPECT_EQ(r.table.optimization.count, 0u);
}

TEST(Protocol, MetricsAreReproducible)
{
  const Scenario s = parseScenario(kMinimal);
  auto run = [&] {
    std::stringstream ss;
    writeMetrics(runProtocol(s).records, ss);
    return ss.str();
  };
  const std::string a = run();
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, run());
}
