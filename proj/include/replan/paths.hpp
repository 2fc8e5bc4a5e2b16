#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "replan/cspace.hpp"

namespace replan
{

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

/// a improves on b by more than rounding noise. Any finite cost improves on +inf.
inline bool strictlyCheaper(double a, double b)
{
  if(!(b < kInfiniteCost)) return a < kInfiniteCost;
  return a < b - 1e-9 * (b > 1.0 ? b : 1.0);
}

/// Waypoint of a path. `already_used` marks nodes the re-planner has
/// already started a path switch from during the current invocation.
struct Node
{
  Configuration config;
  bool already_used = false;
};

/// Waypoint indices bracketing the detected collisions: every colliding edge
/// lies between `before` and `after`.
struct ObstructedSpan
{
  std::size_t before = 0;
  std::size_t after = 0;
};

/// Ordered waypoint sequence. Its cost is the geometric length when free and
/// +inf when an obstruction has been recorded on it.
class Path
{
public:
  Path() = default;
  explicit Path(std::vector<Node> nodes, std::optional<ObstructedSpan> obstruction = std::nullopt);
  static Path fromConfigurations(const std::vector<Configuration>& configs);

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const Configuration& config(std::size_t i) const { return nodes_.at(i).config; }
  const Configuration& front() const { return nodes_.front().config; }
  const Configuration& back() const { return nodes_.back().config; }
  std::vector<Configuration> configurations() const;

  double length() const { return arc_.empty() ? 0.0 : arc_.back(); }
  double cost() const { return obstruction_ ? kInfiniteCost : length(); }
  bool obstructed() const { return obstruction_.has_value(); }
  const std::optional<ObstructedSpan>& obstruction() const { return obstruction_; }
  Path withObstruction(std::optional<ObstructedSpan> span) const;

  /// Cumulative arc length at each waypoint.
  const std::vector<double>& arcLengths() const { return arc_; }

  /// Cost of the portion from waypoint `i` to the last waypoint.
  double costFrom(std::size_t i) const;

  /// Point at arc length s (clamped to the path).
  Configuration pointAt(double s) const;

  /// Index of the waypoint with exactly this configuration.
  std::optional<std::size_t> indexOf(const Configuration& q) const;

  void markUsed(std::size_t i) { nodes_.at(i).already_used = true; }

private:
  std::vector<Node> nodes_;
  std::vector<double> arc_;
  std::optional<ObstructedSpan> obstruction_;
};

double cost(const Path& p);

/// Waypoints i..j (inclusive) with the obstruction span clipped accordingly.
Path subpath(const Path& p, std::size_t from, std::size_t to);

/// Portion between two waypoints of p, identified by configuration.
Path subpath(const Path& p, const Node& from, const Node& to);

/// p1 followed by p2; the shared junction waypoint appears once.
Path concat(const Path& p1, const Path& p2, double tolerance = 1e-9);

/// Point of p closest to a state.
struct Projection
{
  Configuration point;
  double arc = 0.0;          ///< arc length of the point along p
  std::size_t edge = 0;      ///< edge index (edge k joins waypoints k and k+1)
  double distance = 0.0;     ///< distance from the state
};

/// Closest point of p to `state` among points with arc length >= min_arc.
/// Ties are resolved towards the earlier edge.
Projection projectOnPath(const Configuration& state, const Path& p, double min_arc = 0.0);

/// Returns p with a waypoint at arc length `arc` (inserted unless a waypoint
/// already sits there) and that waypoint's index.
std::pair<Path, std::size_t> insertPoint(const Path& p, double arc, double snap = 1e-9);

/// Tracks monotone projections of a moving state onto one path.
class PathProjector
{
public:
  Projection project(const Configuration& state, const Path& p);
  void reset() { last_arc_ = 0.0; }
  double lastArc() const { return last_arc_; }

private:
  double last_arc_ = 0.0;
};

struct CollisionReport
{
  bool obstructed = false;
  std::optional<Node> x_before;
  std::optional<Node> x_after;
  std::size_t before_index = 0;
  std::size_t after_index = 0;
  double checked_at = 0.0;

  std::optional<ObstructedSpan> span() const;
};

/// Checks every edge in order. On collision, x_before is the source of the
/// first colliding edge and x_after the destination of the last one, so the
/// path from x_after on is free of everything detected.
CollisionReport checkPath(const Path& p, const CollisionChecker& checker);

/// Pre-computed paths sharing one goal, with the index of the executed one.
struct PathSet
{
  std::vector<Path> paths;
  std::size_t current = 0;

  void validate() const;
};

/// Splits edges longer than max_edge into equal parts.
Path subdivide(const Path& p, double max_edge);

}  // namespace replan
