#include "replan/planners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "replan/errors.hpp"
#include "replan/nearest.hpp"

namespace replan
{

SamplingBounds::SamplingBounds(Configuration lo, Configuration hi)
  : lower(std::move(lo)), upper(std::move(hi))
{
  require(lower.size() == upper.size() && lower.size() > 0, "SamplingBounds: dimension mismatch");
  require((lower.array() <= upper.array()).all(), "SamplingBounds: lower exceeds upper");
}

bool SamplingBounds::contains(const Configuration& q) const
{
  return q.size() == lower.size() && (q.array() >= lower.array()).all() && (q.array() <= upper.array()).all();
}

double SamplingBounds::volume() const { return (upper - lower).prod(); }

InformedRegion::InformedRegion(Configuration focus_a, Configuration focus_b, double cost_bound)
  : focus_a_(std::move(focus_a)), focus_b_(std::move(focus_b)), cost_bound_(cost_bound)
{
  require(focus_a_.size() == focus_b_.size(), "InformedRegion: dimension mismatch");
  const auto d = focus_a_.size();
  focal_distance_ = (focus_b_ - focus_a_).norm();
  center_ = 0.5 * (focus_a_ + focus_b_);
  rotation_ = Eigen::MatrixXd::Identity(d, d);
  if(focal_distance_ > 0.0)
  {
    // Householder reflection taking e1 onto the focal axis.
    Eigen::VectorXd axis = (focus_b_ - focus_a_) / focal_distance_;
    Eigen::VectorXd v = Eigen::VectorXd::Unit(d, 0) - axis;
    const double vv = v.squaredNorm();
    if(vv > 1e-24) rotation_ -= 2.0 * v * v.transpose() / vv;
  }
  semi_axes_ = Eigen::VectorXd::Zero(d);
  if(!empty() && std::isfinite(cost_bound_))
  {
    const double transverse = 0.5 * std::sqrt(cost_bound_ * cost_bound_ - focal_distance_ * focal_distance_);
    semi_axes_.setConstant(transverse);
    semi_axes_[0] = 0.5 * cost_bound_;
  }
}

double InformedRegion::focalSum(const Configuration& x) const
{
  return (x - focus_a_).norm() + (focus_b_ - x).norm();
}

bool InformedRegion::contains(const Configuration& x) const { return focalSum(x) < cost_bound_; }

Configuration InformedRegion::fromUnitBall(const Eigen::VectorXd& ball) const
{
  return rotation_ * semi_axes_.cwiseProduct(ball) + center_;
}

Configuration sampleUniform(const SamplingBounds& bounds, Rng& rng)
{
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Configuration q(bounds.lower.size());
  for(Eigen::Index i = 0; i < q.size(); ++i)
    q[i] = bounds.lower[i] + unit(rng) * (bounds.upper[i] - bounds.lower[i]);
  return q;
}

Eigen::VectorXd sampleUnitBall(int dimension, Rng& rng)
{
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd v(dimension);
  double n = 0.0;
  do
  {
    for(int i = 0; i < dimension; ++i) v[i] = gauss(rng);
    n = v.norm();
  } while(n == 0.0);
  return v * (std::pow(unit(rng), 1.0 / dimension) / n);
}

Configuration sampleInformed(const InformedRegion& region, const SamplingBounds& bounds, Rng& rng,
                             int rejection_budget)
{
  if(region.empty()) throw EmptyRegionError();
  require(region.focusA().size() == bounds.lower.size(), "sampleInformed: dimension mismatch");
  if(!std::isfinite(region.costBound())) return sampleUniform(bounds, rng);
  for(int draw = 0; draw < rejection_budget; ++draw)
  {
    Configuration x = region.fromUnitBall(sampleUnitBall(bounds.dimension(), rng));
    if(region.contains(x) && bounds.contains(x)) return x;
  }
  throw SamplingExhaustedError();
}

namespace
{

struct Tree
{
  explicit Tree(int dimension) : index(dimension) {}

  std::size_t add(const Configuration& q, long parent)
  {
    parents.push_back(parent);
    return index.add(q);
  }

  std::vector<Configuration> branch(std::size_t id) const
  {
    std::vector<Configuration> out;
    for(long k = static_cast<long>(id); k >= 0; k = parents[static_cast<std::size_t>(k)])
      out.push_back(index.point(static_cast<std::size_t>(k)));
    return out;
  }

  NearestNeighbors index;
  std::vector<long> parents;
};

enum class Extension { trapped, advanced, reached };

Extension extend(Tree& tree, const Configuration& target, PlanningContext& ctx, std::size_t& new_id)
{
  ctx.clock.charge(ctx.params.iteration_cost);
  const std::size_t near = tree.index.nearest(target);
  const Configuration& from = tree.index.point(near);
  const double d = distance(from, target);
  if(d == 0.0)
  {
    new_id = near;
    return Extension::reached;
  }
  const bool reaches = d <= ctx.params.steer;
  Configuration to = reaches ? target : Configuration(from + (ctx.params.steer / d) * (target - from));
  if(!ctx.checker.segmentFree(from, to)) return Extension::trapped;
  new_id = tree.add(to, static_cast<long>(near));
  return reaches ? Extension::reached : Extension::advanced;
}

Extension connect(Tree& tree, const Configuration& target, PlanningContext& ctx, const Deadline& deadline,
                  std::size_t& new_id)
{
  Extension e = Extension::advanced;
  while(e == Extension::advanced && !deadline.expired()) e = extend(tree, target, ctx, new_id);
  return e;
}

std::optional<Path> rrtConnectUnchecked(const Configuration& start, const Configuration& goal,
                                        PlanningContext& ctx, const Deadline& deadline, const Sampler& sampler,
                                        int max_iterations = 0)
{
  if(ctx.checker.segmentFree(start, goal))
    return Path::fromConfigurations({start, goal});

  const int dim = static_cast<int>(start.size());
  Tree from_start(dim), from_goal(dim);
  from_start.add(start, -1);
  from_goal.add(goal, -1);
  Tree* a = &from_start;
  Tree* b = &from_goal;

  for(int it = 0; !deadline.expired() && (max_iterations <= 0 || it < max_iterations); ++it)
  {
    Configuration target;
    try
    {
      target = sampler ? sampler(ctx.rng) : sampleUniform(ctx.bounds, ctx.rng);
    }
    catch(const SamplingExhaustedError&)
    {
      return std::nullopt;
    }
    std::size_t id_a = 0;
    if(extend(*a, target, ctx, id_a) != Extension::trapped)
    {
      std::size_t id_b = 0;
      if(connect(*b, a->index.point(id_a), ctx, deadline, id_b) == Extension::reached)
      {
        std::vector<Configuration> head = a->branch(id_a);
        std::vector<Configuration> tail = b->branch(id_b);
        std::reverse(head.begin(), head.end());
        head.insert(head.end(), tail.begin() + 1, tail.end());
        if(a != &from_start) std::reverse(head.begin(), head.end());
        return Path::fromConfigurations(head);
      }
    }
    std::swap(a, b);
  }
  return std::nullopt;
}

}  // namespace

std::optional<Path> rrtConnect(const Configuration& start, const Configuration& goal,
                               PlanningContext& ctx, const Deadline& deadline, const Sampler& sampler)
{
  require(ctx.checker.configFree(start), "rrtConnect: start in collision");
  require(ctx.checker.configFree(goal), "rrtConnect: goal in collision");
  auto path = rrtConnectUnchecked(start, goal, ctx, deadline, sampler);
  if(path && ctx.params.shortcut) return shortcut(*path, ctx.checker, deadline);
  return path;
}

Path shortcut(const Path& path, const CollisionChecker& checker, const Deadline& deadline)
{
  if(path.size() <= 2) return path;
  std::vector<Configuration> kept{path.front()};
  std::size_t i = 0;
  const std::size_t last = path.size() - 1;
  while(i < last)
  {
    std::size_t next = i + 1;
    if(!deadline.expired())
    {
      for(std::size_t j = last; j > i + 1; --j)
      {
        if(deadline.expired()) break;
        if(checker.segmentFree(path.config(i), path.config(j)))
        {
          next = j;
          break;
        }
      }
    }
    kept.push_back(path.config(next));
    i = next;
  }
  return Path::fromConfigurations(kept);
}

namespace
{

double rewireGamma(const SamplingBounds& bounds)
{
  const double d = bounds.dimension();
  const double unit_ball = std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
  return 2.0 * std::pow(1.0 + 1.0 / d, 1.0 / d) * std::pow(bounds.volume() / unit_ball, 1.0 / d);
}

struct StarTree
{
  explicit StarTree(int dimension) : index(dimension) {}

  std::size_t add(const Configuration& q, long parent, double c)
  {
    parents.push_back(parent);
    costs.push_back(c);
    children.emplace_back();
    if(parent >= 0) children[static_cast<std::size_t>(parent)].push_back(index.size());
    return index.add(q);
  }

  void reparent(std::size_t node, std::size_t parent, double new_cost)
  {
    auto& siblings = children[static_cast<std::size_t>(parents[node])];
    siblings.erase(std::find(siblings.begin(), siblings.end(), node));
    parents[node] = static_cast<long>(parent);
    children[parent].push_back(node);
    const double delta = new_cost - costs[node];
    std::vector<std::size_t> stack{node};
    while(!stack.empty())
    {
      const std::size_t k = stack.back();
      stack.pop_back();
      costs[k] += delta;
      for(std::size_t c : children[k]) stack.push_back(c);
    }
  }

  NearestNeighbors index;
  std::vector<long> parents;
  std::vector<double> costs;
  std::vector<std::vector<std::size_t>> children;
};

}  // namespace

Path rrtStarOptimize(const Path& path, PlanningContext& ctx, const Deadline& deadline)
{
  require(!path.obstructed(), "rrtStarOptimize: input path is not feasible");
  if(path.size() < 2 || deadline.expired()) return path;

  const int dim = static_cast<int>(path.front().size());
  StarTree tree(dim);
  for(std::size_t k = 0; k < path.size(); ++k)
    tree.add(path.config(k), static_cast<long>(k) - 1, path.arcLengths()[k]);
  const std::size_t goal_id = path.size() - 1;
  const double gamma = rewireGamma(ctx.bounds);
  const double max_radius = 2.0 * ctx.params.steer;

  while(!deadline.expired())
  {
    ctx.clock.charge(ctx.params.iteration_cost);
    Configuration sample;
    try
    {
      InformedRegion region(path.front(), path.back(), tree.costs[goal_id]);
      if(region.empty()) break;
      sample = sampleInformed(region, ctx.bounds, ctx.rng, ctx.params.rejection_budget);
    }
    catch(const SamplingExhaustedError&)
    {
      continue;
    }
    const std::size_t near = tree.index.nearest(sample);
    const Configuration& from = tree.index.point(near);
    const double d = distance(from, sample);
    if(d == 0.0) continue;
    Configuration q = d <= ctx.params.steer ? sample : Configuration(from + (ctx.params.steer / d) * (sample - from));

    const double n = static_cast<double>(tree.index.size() + 1);
    const double radius = std::min(max_radius, gamma * std::pow(std::log(n) / n, 1.0 / dim));
    std::vector<std::size_t> neighbors = tree.index.withinRadius(q, radius);
    if(std::find(neighbors.begin(), neighbors.end(), near) == neighbors.end()) neighbors.push_back(near);

    std::vector<std::pair<double, std::size_t>> candidates;
    for(std::size_t k : neighbors) candidates.emplace_back(tree.costs[k] + distance(tree.index.point(k), q), k);
    std::sort(candidates.begin(), candidates.end());

    long parent = -1;
    double q_cost = kInfiniteCost;
    for(const auto& [c, k] : candidates)
    {
      if(deadline.expired()) break;
      if(ctx.checker.segmentFree(tree.index.point(k), q))
      {
        parent = static_cast<long>(k);
        q_cost = c;
        break;
      }
    }
    if(parent < 0) continue;
    const std::size_t q_id = tree.add(q, parent, q_cost);

    for(std::size_t k : neighbors)
    {
      if(static_cast<long>(k) == parent || tree.parents[k] < 0) continue;
      const double via = q_cost + distance(q, tree.index.point(k));
      if(via < tree.costs[k] && ctx.checker.segmentFree(q, tree.index.point(k)))
        tree.reparent(k, q_id, via);
    }
  }

  std::vector<Configuration> chain;
  for(long k = static_cast<long>(goal_id); k >= 0; k = tree.parents[static_cast<std::size_t>(k)])
    chain.push_back(tree.index.point(static_cast<std::size_t>(k)));
  std::reverse(chain.begin(), chain.end());
  Path best = Path::fromConfigurations(chain);
  return best.cost() <= path.cost() ? best : path;
}

std::optional<Path> planInEllipsoid(const Configuration& x_n, const Configuration& x_j, double cost_bound,
                                    PlanningContext& ctx, const Deadline& deadline)
{
  InformedRegion region(x_n, x_j, cost_bound);
  if(region.empty()) return std::nullopt;
  if(deadline.expired()) return std::nullopt;
  if(!ctx.checker.configFree(x_n) || !ctx.checker.configFree(x_j)) return std::nullopt;

  Sampler sampler = [&](Rng& rng) { return sampleInformed(region, ctx.bounds, rng, ctx.params.rejection_budget); };
  std::optional<Path> conn = rrtConnectUnchecked(x_n, x_j, ctx, deadline, sampler, ctx.params.connector_iterations);
  if(!conn) return std::nullopt;
  if(ctx.params.shortcut) conn = shortcut(*conn, ctx.checker, deadline);
  if(ctx.params.connector == ConnectorPlanner::rrt_star && conn->size() > 2)
    conn = rrtStarOptimize(*conn, ctx, deadline);
  if(!(conn->cost() < cost_bound)) return std::nullopt;
  return conn;
}

}  // namespace replan
