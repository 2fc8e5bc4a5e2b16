#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "replan/cspace.hpp"
#include "replan/paths.hpp"
#include "replan/planners.hpp"
#include "replan/replanner.hpp"

namespace replan
{

/// Constant-speed traversal of a path starting at start_time.
struct Trajectory
{
  std::shared_ptr<const Path> path;
  double speed = 1.0;
  double duration = 0.0;
  double start_time = 0.0;

  double arcAt(double t) const;
};

Trajectory computeTrajectory(const Path& p, double speed, double start_time);
Configuration sampleTrajectory(const Trajectory& trj, double t);

/// One record of an episode log.
struct Event
{
  double t = 0.0;
  std::string type;
  nlohmann::json data;
};

/// Append-only event log, streamed as one JSON object per line.
class EpisodeLog
{
public:
  EpisodeLog() = default;
  EpisodeLog(const EpisodeLog& other);
  EpisodeLog& operator=(const EpisodeLog& other);

  void append(double t, std::string type, nlohmann::json data = nlohmann::json::object());
  std::vector<Event> events() const;
  std::vector<Event> ofType(const std::string& type) const;

  void write(std::ostream& os) const;
  static EpisodeLog read(std::istream& is);

private:
  mutable std::mutex mutex_;
  std::vector<Event> events_;
};

nlohmann::json toJson(const Configuration& q);
Configuration configurationFromJson(const nlohmann::json& j);
nlohmann::json toJson(const Path& p);
nlohmann::json toJson(const Box& b);

/// What a spawn policy sees when its obstacle is due.
struct SpawnContext
{
  double time;
  const Configuration& state;
  const Path& current_path;
  double arc;  ///< robot arc length along current_path
  const RobotModel& model;
  Rng& rng;
};

using SpawnPolicy = std::function<std::optional<Box>(const SpawnContext&)>;

struct ScheduledSpawn
{
  double time = 0.0;
  SpawnPolicy policy;
};

struct ExecutorConfig
{
  double speed = 1.0;
  double execution_rate = 100.0;
  double collision_rate = 30.0;
  double time_limit = 10.0;
  double goal_tolerance = 1e-3;
  double reduced_time = 0.05;
  double relaxed_time = 0.1;
  double resolution = 0.01;
  double padding = 0.0;          ///< box inflation for planning
  double monitor_padding = 0.0;  ///< box inflation for the collision loop
  double merge_threshold = 0.05;
  PlannerParams planner;
  WorkModel work;
  bool wall_clock = false;
  bool log_states = true;
};

struct EpisodeSetup
{
  std::shared_ptr<const RobotModel> model;
  SamplingBounds bounds;
  World world;
  std::vector<ScheduledSpawn> spawns;
  ExecutorConfig config;
  std::uint64_t seed = 0;
};

/// Bookkeeping of one re-planner invocation.
struct ReplanRecord
{
  std::size_t id = 0;
  double start = 0.0;
  double finish = 0.0;
  ReplanMode mode = ReplanMode::optimization;
  double t_rp = 0.0;
  double elapsed = 0.0;
  double wall_time = 0.0;
  double mean_cycle = 0.0;
  double max_cycle = 0.0;
  std::size_t cycles = 0;
  bool feasible = false;
  bool improved = false;
  double cost_cur = 0.0;
  double cost_rp = 0.0;
  std::vector<double> incumbent_costs;
};

/// A re-planned path the robot started following.
struct AcceptedReplan
{
  std::size_t replan_id = 0;
  double time = 0.0;
  ReplanMode mode = ReplanMode::optimization;
  Path path;
  double snapshot_time = 0.0;
  double length_cur = 0.0;
  double length_rp = 0.0;
  double replan_time = 0.0;
};

struct EpisodeResult
{
  EpisodeLog log;
  World world;
  bool goal_reached = false;
  double end_time = 0.0;
  std::vector<double> times;
  std::vector<Configuration> traversed;
  std::vector<ReplanRecord> replans;
  std::vector<AcceptedReplan> accepted;
  std::size_t safety_stops = 0;
};

/// Executes S.paths[S.current] while re-planning and collision checking run
/// alongside, until the goal is reached or the time limit elapses. In
/// simulated mode the three loops are stepped by a deterministic scheduler
/// and planner time is metered by the work model; in wall-clock mode they run
/// as threads.
EpisodeResult runEpisode(const PathSet& S, EpisodeSetup setup);

/// Trajectory path that continues from `state` along `replanned`: directly
/// when the state lies on it, through a free straight bridge to its closest
/// point, or by backing up along `current` to the re-planned start.
std::optional<Path> splice(const Configuration& state, double state_arc, const Path& current,
                           const Path& replanned, const CollisionChecker& checker);

}  // namespace replan
