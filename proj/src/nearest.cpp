#include "replan/nearest.hpp"

#include <algorithm>
#include <limits>

#include "replan/errors.hpp"

namespace replan
{

NearestNeighbors::NearestNeighbors(int dimension)
  : dimension_(dimension), use_kd_(dimension <= kMaxKdDimension)
{
  require(dimension > 0, "NearestNeighbors: dimension must be positive");
}

std::size_t NearestNeighbors::add(const Configuration& q)
{
  require(q.size() == dimension_, "NearestNeighbors: dimension mismatch");
  const std::size_t id = points_.size();
  points_.push_back(q);
  if(!use_kd_) return id;

  if(kd_.empty())
  {
    kd_.push_back({id, 0});
    return id;
  }
  int node = 0;
  while(true)
  {
    KdNode& n = kd_[static_cast<std::size_t>(node)];
    const bool go_left = q[n.axis] < points_[n.id][n.axis];
    int& child = go_left ? n.left : n.right;
    if(child < 0)
    {
      const int axis = (n.axis + 1) % dimension_;
      child = static_cast<int>(kd_.size());
      kd_.push_back({id, axis});
      return id;
    }
    node = child;
  }
}

std::size_t NearestNeighbors::nearest(const Configuration& q) const
{
  require(!points_.empty(), "NearestNeighbors: empty index");
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  if(use_kd_)
  {
    nearestKd(0, q, best, best_d2);
    return best;
  }
  for(std::size_t i = 0; i < points_.size(); ++i)
  {
    const double d2 = (points_[i] - q).squaredNorm();
    if(d2 < best_d2)
    {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

void NearestNeighbors::nearestKd(int node, const Configuration& q, std::size_t& best, double& best_d2) const
{
  if(node < 0) return;
  const KdNode& n = kd_[static_cast<std::size_t>(node)];
  const double d2 = (points_[n.id] - q).squaredNorm();
  if(d2 < best_d2 || (d2 == best_d2 && n.id < best))
  {
    best_d2 = d2;
    best = n.id;
  }
  const double diff = q[n.axis] - points_[n.id][n.axis];
  const int near = diff < 0.0 ? n.left : n.right;
  const int far = diff < 0.0 ? n.right : n.left;
  nearestKd(near, q, best, best_d2);
  if(diff * diff <= best_d2) nearestKd(far, q, best, best_d2);
}

std::vector<std::size_t> NearestNeighbors::withinRadius(const Configuration& q, double radius) const
{
  std::vector<std::size_t> out;
  const double r2 = radius * radius;
  if(use_kd_)
  {
    if(!kd_.empty()) radiusKd(0, q, r2, out);
    std::sort(out.begin(), out.end());
    return out;
  }
  for(std::size_t i = 0; i < points_.size(); ++i)
    if((points_[i] - q).squaredNorm() <= r2) out.push_back(i);
  return out;
}

void NearestNeighbors::radiusKd(int node, const Configuration& q, double r2, std::vector<std::size_t>& out) const
{
  if(node < 0) return;
  const KdNode& n = kd_[static_cast<std::size_t>(node)];
  if((points_[n.id] - q).squaredNorm() <= r2) out.push_back(n.id);
  const double diff = q[n.axis] - points_[n.id][n.axis];
  if(diff < 0.0 || diff * diff <= r2) radiusKd(n.left, q, r2, out);
  if(diff >= 0.0 || diff * diff <= r2) radiusKd(n.right, q, r2, out);
}

}  // namespace replan
