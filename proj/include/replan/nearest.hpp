#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "replan/cspace.hpp"

namespace replan
{

/// Nearest-neighbour index over configurations identified by insertion id.
/// Uses an incremental kd-tree in low dimension and a linear scan above it,
/// where small trees gain nothing from spatial partitioning.
class NearestNeighbors
{
public:
  static constexpr int kMaxKdDimension = 3;

  explicit NearestNeighbors(int dimension);

  std::size_t add(const Configuration& q);
  std::size_t size() const { return points_.size(); }
  const Configuration& point(std::size_t id) const { return points_[id]; }

  /// Id of the closest point; ties resolve to the lowest id.
  std::size_t nearest(const Configuration& q) const;

  /// Ids of all points within `radius`, ascending.
  std::vector<std::size_t> withinRadius(const Configuration& q, double radius) const;

private:
  struct KdNode
  {
    std::size_t id;
    int axis;
    int left = -1;
    int right = -1;
  };

  void nearestKd(int node, const Configuration& q, std::size_t& best, double& best_d2) const;
  void radiusKd(int node, const Configuration& q, double r2, std::vector<std::size_t>& out) const;

  int dimension_;
  bool use_kd_;
  std::vector<Configuration> points_;
  std::vector<KdNode> kd_;
};

}  // namespace replan
