#include <gtest/gtest.h>

#include <sstream>

#include "helpers.hpp"
#include "replan/errors.hpp"
#include "replan/executor.hpp"

using namespace replan;
using namespace replan::testing;

namespace
{

PathSet corridorPaths()
{
  const Path straight = subdivide(polyline({v3(-1, 0, 0), v3(1, 0, 0)}), 0.1);
  const Path above = subdivide(polyline({v3(-1, 0, 0), v3(-0.5, 0.5, 0), v3(0.5, 0.5, 0), v3(1, 0, 0)}), 0.1);
  const Path below = subdivide(polyline({v3(-1, 0, 0), v3(-0.5, -0.5, 0.1), v3(0.5, -0.5, 0.1), v3(1, 0, 0)}), 0.1);
  return PathSet{{straight, above, below}, 0};
}

EpisodeSetup corridorSetup(std::vector<ScheduledSpawn> spawns = {}, std::uint64_t seed = 3)
{
  EpisodeSetup setup{pointRobot(), unitBounds(1.2), World(), std::move(spawns), ExecutorConfig{}, seed};
  setup.config.resolution = 0.01;
  setup.config.padding = 0.01;
  setup.config.monitor_padding = 0.005;
  setup.config.time_limit = 6.0;
  setup.config.planner.iteration_cost = setup.config.work.iteration_cost;
  return setup;
}

ScheduledSpawn fixedCube(double time, const Eigen::Vector3d& center, double half)
{
  return {time, [=](const SpawnContext& ctx) { return std::optional<Box>(Box(center, Eigen::Vector3d::Constant(half), ctx.time)); }};
}

}  // namespace

TEST(Trajectory, ConstantSpeedSampling)
{
  const Path p = polyline({v3(0, 0, 0), v3(1, 0, 0), v3(1, 2, 0)});
  const Trajectory trj = computeTrajectory(p, 0.5, 10.0);
  EXPECT_DOUBLE_EQ(trj.duration, 6.0);
  EXPECT_EQ(sampleTrajectory(trj, 9.0), p.front());
  EXPECT_EQ(sampleTrajectory(trj, 10.0), p.front());
  EXPECT_TRUE(sampleTrajectory(trj, 11.0).isApprox(v3(0.5, 0, 0)));
  EXPECT_TRUE(sampleTrajectory(trj, 13.0).isApprox(v3(1, 0.5, 0)));
  EXPECT_EQ(sampleTrajectory(trj, 16.0), p.back());
  EXPECT_EQ(sampleTrajectory(trj, 100.0), p.back());
  EXPECT_THROW(computeTrajectory(p, 0.0, 0.0), ContractViolation);
  EXPECT_THROW(computeTrajectory(p.withObstruction(ObstructedSpan{0, 1}), 1.0, 0.0), ContractViolation);
}

TEST(Trajectory, ArcMatchesPrefixSums)
{
  const Path p = polyline({v3(0, 0, 0), v3(0.3, 0.4, 0), v3(0.3, 0.4, 1.2), v3(-0.3, -0.4, 1.2)});
  const Trajectory trj = computeTrajectory(p, 2.0, 0.0);
  const double cum[] = {0.0, 0.5, 1.7, 2.7};
  for(int k = 0; k < 4; ++k) EXPECT_LT((sampleTrajectory(trj, cum[k] / 2.0) - p.config(k)).norm(), 1e-12);
}

TEST(Splice, DirectBridgeAndBacktrack)
{
  auto empty = std::make_shared<const WorldSnapshot>(std::vector<Box>{}, 0.0);
  const CollisionChecker free_checker(empty, pointRobot(), 0.01);
  const Path current = polyline({v3(0, 0, 0), v3(1, 0, 0), v3(2, 0, 0)});
  const Path replanned = polyline({v3(0.5, 0, 0), v3(1, 1, 0), v3(2, 0, 0)});

  // State on the re-planned path: trimmed to its remainder.
  const auto direct = splice(v3(0.5, 0, 0), 0.5, current, replanned, free_checker);
  ASSERT_TRUE(direct);
  EXPECT_EQ(direct->front(), v3(0.5, 0, 0));
  EXPECT_NEAR(direct->length(), replanned.length(), 1e-12);

  // State ahead of x_h: straight bridge to the closest point.
  const auto bridge = splice(v3(0.8, 0, 0), 0.8, current, replanned, free_checker);
  ASSERT_TRUE(bridge);
  EXPECT_EQ(bridge->front(), v3(0.8, 0, 0));
  EXPECT_EQ(bridge->back(), v3(2, 0, 0));

  // Bridge blocked: back up along the current path to x_h.
  auto wall = std::make_shared<const WorldSnapshot>(
      std::vector<Box>{Box(Eigen::Vector3d(0.68, 0.07, 0), Eigen::Vector3d::Constant(0.03))}, 0.0);
  const CollisionChecker wall_checker(wall, pointRobot(), 0.01);
  const auto back = splice(v3(0.8, 0, 0), 0.8, current, replanned, wall_checker);
  ASSERT_TRUE(back);
  EXPECT_EQ(back->front(), v3(0.8, 0, 0));
  EXPECT_EQ(back->config(1), v3(0.5, 0, 0));
  EXPECT_NEAR(back->length(), 0.3 + replanned.length(), 1e-12);

  // No way back either.
  auto boxed = std::make_shared<const WorldSnapshot>(
      std::vector<Box>{Box(Eigen::Vector3d(0.68, 0.07, 0), Eigen::Vector3d::Constant(0.03)),
                       Box(Eigen::Vector3d(0.6, 0, 0), Eigen::Vector3d::Constant(0.02))},
      0.0);
  const CollisionChecker boxed_checker(boxed, pointRobot(), 0.01);
  EXPECT_FALSE(splice(v3(0.8, 0, 0), 0.8, current, replanned, boxed_checker));
}

TEST(EpisodeLog, RoundTrip)
{
  EpisodeLog log;
  log.append(0.0, "episode-start", {{"seed", 3}});
  log.append(0.5, "state", {{"q", toJson(v3(1, 2, 3))}});
  std::stringstream ss;
  log.write(ss);
  const EpisodeLog back = EpisodeLog::read(ss);
  ASSERT_EQ(back.events().size(), 2u);
  EXPECT_EQ(back.events()[1].type, "state");
  EXPECT_EQ(configurationFromJson(back.events()[1].data["q"]), v3(1, 2, 3));
  std::stringstream bad("{\"t\": 1}\n");
  EXPECT_THROW(EpisodeLog::read(bad), std::runtime_error);
}

TEST(Episode, NoObstaclesReachesGoal)
{
  const PathSet S = corridorPaths();
  const EpisodeResult r = runEpisode(S, corridorSetup());
  EXPECT_TRUE(r.goal_reached);
  EXPECT_EQ(r.safety_stops, 0u);
  EXPECT_NEAR(r.end_time, 2.0, 0.02);
  EXPECT_TRUE(r.accepted.empty());
  EXPECT_FALSE(r.replans.empty());
  for(const auto& rec : r.replans) EXPECT_EQ(rec.mode, ReplanMode::optimization);
  EXPECT_EQ(r.traversed.front(), S.paths[0].front());
  EXPECT_LE(distance(r.traversed.back(), S.paths[0].back()), 1e-3);
  EXPECT_EQ(r.log.ofType("goal-reached").size(), 1u);
}

TEST(Episode, AvoidsSpawnedCube)
{
  const PathSet S = corridorPaths();
  const EpisodeResult r = runEpisode(S, corridorSetup({fixedCube(0.3, Eigen::Vector3d(0.3, 0, 0), 0.05)}));
  EXPECT_TRUE(r.goal_reached);
  EXPECT_EQ(r.safety_stops, 0u);
  ASSERT_FALSE(r.log.ofType("collision-detected").empty());
  bool avoided = false;
  for(const auto& a : r.accepted) avoided = avoided || a.mode == ReplanMode::avoidance;
  EXPECT_TRUE(avoided);

  // Continuity and clearance of the executed motion.
  const Box box(Eigen::Vector3d(0.3, 0, 0), Eigen::Vector3d::Constant(0.05));
  for(std::size_t k = 0; k < r.traversed.size(); ++k)
  {
    EXPECT_FALSE(box.contains(r.traversed[k].head<3>()));
    if(k > 0) { EXPECT_LE(distance(r.traversed[k], r.traversed[k - 1]), 1.0 / 100.0 + 1e-9); }
  }
  // Accepted paths are free against the world they were planned on.
  for(const auto& a : r.accepted)
  {
    const CollisionChecker fine(r.world.snapshot(a.snapshot_time), pointRobot(), 0.005);
    for(std::size_t k = 0; k + 1 < a.path.size(); ++k) EXPECT_TRUE(fine.segmentFree(a.path.config(k), a.path.config(k + 1)));
  }
}

TEST(Episode, CubeOnRobotStops)
{
  const PathSet S = corridorPaths();
  ScheduledSpawn on_robot{0.5, [](const SpawnContext& ctx) {
                            return std::optional<Box>(Box(ctx.state.head<3>(), Eigen::Vector3d::Constant(0.05), ctx.time));
                          }};
  EpisodeSetup setup = corridorSetup({on_robot});
  setup.config.time_limit = 2.0;
  const EpisodeResult r = runEpisode(S, std::move(setup));
  EXPECT_FALSE(r.goal_reached);
  EXPECT_GE(r.safety_stops, 1u);
  EXPECT_FALSE(r.log.ofType("safety-stop").empty());
  EXPECT_EQ(r.log.ofType("time-limit").size(), 1u);
}

TEST(Episode, ReplansRespectBudgets)
{
  const PathSet S = corridorPaths();
  const EpisodeResult r = runEpisode(S, corridorSetup({fixedCube(0.3, Eigen::Vector3d(0.3, 0, 0), 0.05)}));
  for(const auto& rec : r.replans)
  {
    EXPECT_LE(rec.elapsed, rec.t_rp + rec.mean_cycle + 1e-12);
    EXPECT_DOUBLE_EQ(rec.t_rp, rec.mode == ReplanMode::avoidance ? 0.05 : 0.1);
    for(std::size_t k = 1; k < rec.incumbent_costs.size(); ++k)
      EXPECT_LT(rec.incumbent_costs[k], rec.incumbent_costs[k - 1]);
    if(rec.feasible) { EXPECT_LE(rec.cost_rp, rec.cost_cur); }
  }
}

TEST(Episode, DeterministicForSeed)
{
  const PathSet S = corridorPaths();
  // Everything but the measured wall time is reproducible.
  auto run = [&] {
    EpisodeLog log;
    for(Event e : runEpisode(S, corridorSetup({fixedCube(0.3, Eigen::Vector3d(0.3, 0, 0), 0.05)})).log.events())
    {
      e.data.erase("wall_time");
      log.append(e.t, e.type, e.data);
    }
    std::stringstream ss;
    log.write(ss);
    return ss.str();
  };
  EXPECT_EQ(run(), run());
}

TEST(Episode, WallClockModeReachesGoal)
{
  const PathSet S = corridorPaths();
  EpisodeSetup setup = corridorSetup();
  setup.config.wall_clock = true;
  setup.config.speed = 2.0;
  const EpisodeResult r = runEpisode(S, std::move(setup));
  EXPECT_TRUE(r.goal_reached);
  EXPECT_NEAR(r.end_time, 1.0, 0.05);
}
