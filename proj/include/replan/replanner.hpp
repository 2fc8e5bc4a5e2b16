#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "replan/clock.hpp"
#include "replan/paths.hpp"
#include "replan/planners.hpp"

namespace replan
{

enum class ReplanMode { avoidance, optimization };

std::string toString(ReplanMode mode);

/// Cycle time of the re-planner: short when the current path is obstructed,
/// long when it is only being optimized.
struct TimeBudget
{
  double reduced_time = 0.05;
  double relaxed_time = 0.1;
  ReplanMode mode = ReplanMode::optimization;
  double t_rp = 0.1;

  static TimeBudget make(double reduced, double relaxed);
};

TimeBudget updateBudget(const CollisionReport& report, TimeBudget budget);

/// Durations of the successful cycles of one path-switch call.
class CycleTimeTracker
{
public:
  void record(double duration);
  bool empty() const { return durations_.empty(); }
  double mean() const;
  const std::vector<double>& durations() const { return durations_; }

private:
  std::vector<double> durations_;
  double sum_ = 0.0;
};

/// Whether a new path-switch cycle may start. Before any feasible solution
/// the only limit is the remaining time; afterwards the remaining time must
/// exceed the mean duration of the previous successful cycles.
bool cycleGate(const CycleTimeTracker& tracker, double remaining, bool has_solution);

/// Necessary condition for a connection x_n -> x_j to improve the best path:
/// |x_n - x_j| < best_cost - goal_tail_cost. Always true while best is +inf.
bool pruneCheck(const Configuration& x_n, const Configuration& x_j, double best_cost, double goal_tail_cost);

/// A candidate skipped by pruneCheck.
struct PruneEvent
{
  Configuration x_n;
  Configuration x_j;
  std::size_t path_index = 0;
  std::size_t node_index = 0;
  double tail_cost = 0.0;
  double incumbent_cost = 0.0;
};

class SwitchObserver
{
public:
  virtual ~SwitchObserver() = default;
  virtual void onPrune(const PruneEvent&) {}
  virtual void onCycle(double /*duration*/, bool /*success*/) {}
};

struct CycleStats
{
  std::size_t cycles = 0;
  std::size_t successful = 0;
  double total_duration = 0.0;
  double max_duration = 0.0;

  void add(double duration, bool success);
  double mean() const { return cycles ? total_duration / static_cast<double>(cycles) : 0.0; }
};

struct ReplanContext
{
  PlanningContext& planning;
  double merge_threshold = 0.05;
  SwitchObserver* observer = nullptr;
};

/// Best path from x_n (a waypoint of sigma_i) to the goal obtained by
/// connecting x_n to the waypoints of the paths in P. Starts from
/// sigma_i[x_n, goal]; the result has infinite cost when that is obstructed
/// and no connection was found.
Path pathSwitch(const Configuration& x_n, const Path& sigma_i, const std::vector<Path>& P,
                const Deadline& deadline, ReplanContext& ctx, CycleStats* stats = nullptr);

struct ReplanOutcome
{
  Path path;
  double elapsed = 0.0;
  bool improved = false;
  ReplanMode mode = ReplanMode::optimization;
  double t_rp = 0.0;
  Configuration x_h;
  double cost_cur = kInfiniteCost;    ///< cost of sigma_i[x_h, goal] at call time
  double length_cur = 0.0;            ///< its geometric length
  std::vector<double> incumbent_costs;  ///< costs of the accepted updates, in order
  CycleStats cycles;
  double snapshot_time = 0.0;

  bool feasible() const { return std::isfinite(path.cost()); }
};

/// Re-plans from x_h, which must lie on S.paths[S.current]. `report` is the
/// latest collision verdict for the remainder of the current path; its
/// waypoints are matched by configuration. Runs path switches from the nodes
/// nearest to the goal first until no node is left or t_RP has elapsed.
ReplanOutcome informedOnlineReplanning(const PathSet& S, const Configuration& x_h, const TimeBudget& budget,
                                       const CollisionReport& report, ReplanContext& ctx);

}  // namespace replan
