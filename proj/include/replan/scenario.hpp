#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "replan/cspace.hpp"
#include "replan/executor.hpp"
#include "replan/planners.hpp"

namespace replan
{

/// Raised for unreadable or invalid scenario files. The message carries
/// the file name and, where known, the line number.
class ScenarioError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class SpawnPlacement { random_edge, robot_edge, fixed };

struct SpawnEvent
{
  double time = 0.0;
  double side = 0.05;
  SpawnPlacement placement = SpawnPlacement::random_edge;
  std::optional<Eigen::Vector3d> center;  ///< for fixed placement
};

struct PlanningConfig
{
  std::size_t paths = 4;
  double resolution = 0.01;
  double padding = 0.0;
  double steer = 0.3;
  double merge_threshold = 0.05;
  int rejection_budget = 1000;
  ConnectorPlanner connector = ConnectorPlanner::rrt_connect;
  bool shortcut = true;
  int connector_iterations = 200;
  double initial_connect_time = 1.0;   ///< virtual seconds per initial RRT-Connect call
  double initial_optimize_time = 0.5;  ///< virtual seconds of RRT* per initial path
  double initial_max_edge = 0.1;       ///< initial paths are subdivided to this edge length
};

struct Scenario
{
  std::string name;
  int dimension = 3;
  Configuration lower;
  Configuration upper;
  RobotModel robot = RobotModel::point(3);
  Configuration start;
  Configuration goal;
  std::vector<Box> static_obstacles;
  std::vector<SpawnEvent> spawns;
  PlanningConfig planning;
  ExecutorConfig execution;   ///< rates, speed, limits, budgets, work model
  double robot_edge_clearance = 0.3;
  std::size_t trials = 30;
  std::uint64_t seed = 1;
  std::vector<std::string> warnings;

  SamplingBounds bounds() const { return SamplingBounds(lower, upper); }
  World staticWorld() const;
};

Scenario loadScenario(const std::string& file);
Scenario parseScenario(const std::string& text, const std::string& source = "<string>");

/// Checks the invariants a runnable scenario must satisfy. Throws ScenarioError.
void validateScenario(const Scenario& s);

std::string toString(SpawnPlacement p);

}  // namespace replan
