#pragma once

#include <functional>
#include <optional>
#include <random>
#include <stdexcept>

#include "replan/clock.hpp"
#include "replan/cspace.hpp"
#include "replan/paths.hpp"

namespace replan
{

/// Random engine shared by all planners. One seed per trial.
using Rng = std::mt19937_64;

/// Axis-aligned sampling box of the configuration space.
struct SamplingBounds
{
  Configuration lower;
  Configuration upper;

  SamplingBounds(Configuration lo, Configuration hi);
  int dimension() const { return static_cast<int>(lower.size()); }
  bool contains(const Configuration& q) const;
  double volume() const;
};

class EmptyRegionError : public std::runtime_error
{
public:
  EmptyRegionError() : std::runtime_error("informed region is empty") {}
};

class SamplingExhaustedError : public std::runtime_error
{
public:
  SamplingExhaustedError() : std::runtime_error("no informed sample inside the bounds") {}
};

/// Prolate hyper-ellipsoid of points x with |x - a| + |b - x| < cost_bound.
class InformedRegion
{
public:
  InformedRegion(Configuration focus_a, Configuration focus_b, double cost_bound);

  bool empty() const { return !(cost_bound_ > focal_distance_); }
  bool contains(const Configuration& x) const;
  double focalSum(const Configuration& x) const;

  const Configuration& focusA() const { return focus_a_; }
  const Configuration& focusB() const { return focus_b_; }
  double costBound() const { return cost_bound_; }
  double focalDistance() const { return focal_distance_; }

  /// Maps a point of the unit ball into the ellipsoid.
  Configuration fromUnitBall(const Eigen::VectorXd& ball) const;

private:
  Configuration focus_a_;
  Configuration focus_b_;
  double cost_bound_;
  double focal_distance_;
  Configuration center_;
  Eigen::MatrixXd rotation_;  // first column along the focal axis
  Eigen::VectorXd semi_axes_;
};

Configuration sampleUniform(const SamplingBounds& bounds, Rng& rng);

/// Uniform point of the unit d-ball.
Eigen::VectorXd sampleUnitBall(int dimension, Rng& rng);

/// Direct informed sample, rejected against the bounds at most
/// `rejection_budget` times.
Configuration sampleInformed(const InformedRegion& region, const SamplingBounds& bounds, Rng& rng,
                             int rejection_budget = 1000);

enum class ConnectorPlanner { rrt_connect, rrt_star };

struct PlannerParams
{
  double steer = 0.3;              ///< maximum extension per tree step
  int rejection_budget = 1000;
  bool shortcut = true;            ///< shortcut connector paths before returning
  int connector_iterations = 200;  ///< path-switch connector gives up after this many tree iterations (0: no limit)
  ConnectorPlanner connector = ConnectorPlanner::rrt_connect;
  double iteration_cost = 0.0;     ///< virtual seconds charged per tree iteration
};

/// Everything a planner invocation needs. The checker should charge the
/// same clock the deadline runs on.
struct PlanningContext
{
  const CollisionChecker& checker;
  const SamplingBounds& bounds;
  const PlannerParams& params;
  Rng& rng;
  Clock& clock;
};

using Sampler = std::function<Configuration(Rng&)>;

/// Bidirectional RRT with greedy connect. Throws ContractViolation when start
/// or goal is in collision; returns nullopt on timeout.
std::optional<Path> rrtConnect(const Configuration& start, const Configuration& goal,
                               PlanningContext& ctx, const Deadline& deadline,
                               const Sampler& sampler = {});

/// Anytime RRT* seeded with the waypoints of a feasible path. Samples the
/// informed set of the current best solution. Never returns a costlier path.
Path rrtStarOptimize(const Path& path, PlanningContext& ctx, const Deadline& deadline);

/// Connector for path switching: plans from x_n to x_j sampling only the
/// informed set bounded by cost_bound (uniform when the bound is infinite).
/// Fails immediately when the set is empty or an endpoint is in collision.
std::optional<Path> planInEllipsoid(const Configuration& x_n, const Configuration& x_j, double cost_bound,
                                    PlanningContext& ctx, const Deadline& deadline);

/// Greedy shortcutting: from each kept waypoint jump to the farthest later
/// waypoint reachable by a free straight segment. Stops early at the deadline.
Path shortcut(const Path& path, const CollisionChecker& checker, const Deadline& deadline);

}  // namespace replan
