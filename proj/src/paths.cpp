#include "replan/paths.hpp"

#include <algorithm>
#include <cmath>

#include "replan/errors.hpp"

namespace replan
{

Path::Path(std::vector<Node> nodes, std::optional<ObstructedSpan> obstruction)
  : nodes_(std::move(nodes)), obstruction_(obstruction)
{
  require(!nodes_.empty(), "Path: no waypoints");
  arc_.resize(nodes_.size());
  arc_[0] = 0.0;
  for(std::size_t k = 1; k < nodes_.size(); ++k)
    arc_[k] = arc_[k - 1] + distance(nodes_[k - 1].config, nodes_[k].config);
  if(obstruction_)
  {
    require(obstruction_->before < obstruction_->after && obstruction_->after < nodes_.size(),
            "Path: invalid obstruction span");
  }
}

Path Path::fromConfigurations(const std::vector<Configuration>& configs)
{
  std::vector<Node> nodes;
  nodes.reserve(configs.size());
  for(const Configuration& q : configs) nodes.push_back({q, false});
  return Path(std::move(nodes));
}

std::vector<Configuration> Path::configurations() const
{
  std::vector<Configuration> out;
  out.reserve(nodes_.size());
  for(const Node& n : nodes_) out.push_back(n.config);
  return out;
}

Path Path::withObstruction(std::optional<ObstructedSpan> span) const
{
  Path p = *this;
  if(span)
    require(span->before < span->after && span->after < nodes_.size(), "Path: invalid obstruction span");
  p.obstruction_ = span;
  return p;
}

double Path::costFrom(std::size_t i) const
{
  require(i < nodes_.size(), "Path::costFrom: index out of range");
  if(obstruction_ && i < obstruction_->after) return kInfiniteCost;
  return arc_.back() - arc_[i];
}

Configuration Path::pointAt(double s) const
{
  if(s <= 0.0 || nodes_.size() == 1) return nodes_.front().config;
  if(s >= arc_.back()) return nodes_.back().config;
  auto it = std::upper_bound(arc_.begin(), arc_.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - arc_.begin()) - 1;
  const double len = arc_[k + 1] - arc_[k];
  const double f = len > 0.0 ? std::clamp((s - arc_[k]) / len, 0.0, 1.0) : 0.0;
  return interpolate(nodes_[k].config, nodes_[k + 1].config, f);
}

std::optional<std::size_t> Path::indexOf(const Configuration& q) const
{
  for(std::size_t k = 0; k < nodes_.size(); ++k)
    if(nodes_[k].config.size() == q.size() && nodes_[k].config == q) return k;
  return std::nullopt;
}

double cost(const Path& p) { return p.cost(); }

Path subpath(const Path& p, std::size_t from, std::size_t to)
{
  require(from <= to && to < p.size(), "subpath: invalid waypoint range");
  std::vector<Node> nodes(p.nodes().begin() + static_cast<long>(from),
                          p.nodes().begin() + static_cast<long>(to) + 1);
  std::optional<ObstructedSpan> span;
  if(const auto& o = p.obstruction(); o && from < o->after && to > o->before)
    span = ObstructedSpan{std::max(o->before, from) - from, std::min(o->after, to) - from};
  return Path(std::move(nodes), span);
}

Path subpath(const Path& p, const Node& from, const Node& to)
{
  auto i = p.indexOf(from.config);
  auto j = p.indexOf(to.config);
  require(i && j, "subpath: node not on path");
  return subpath(p, *i, *j);
}

Path concat(const Path& p1, const Path& p2, double tolerance)
{
  require(distance(p1.back(), p2.front()) <= tolerance, "concat: endpoint mismatch");
  std::vector<Node> nodes = p1.nodes();
  nodes.insert(nodes.end(), p2.nodes().begin() + 1, p2.nodes().end());
  const std::size_t shift = p1.size() - 1;
  std::optional<ObstructedSpan> span = p1.obstruction();
  if(const auto& o2 = p2.obstruction())
  {
    ObstructedSpan moved{o2->before + shift, o2->after + shift};
    if(span) span->after = moved.after;
    else span = moved;
  }
  return Path(std::move(nodes), span);
}

Projection projectOnPath(const Configuration& state, const Path& p, double min_arc)
{
  require(!p.empty(), "projectOnPath: empty path");
  const auto& arc = p.arcLengths();
  min_arc = std::clamp(min_arc, 0.0, p.length());
  Projection best;
  best.distance = kInfiniteCost;
  if(p.size() == 1)
  {
    best.point = p.front();
    best.distance = distance(state, best.point);
    return best;
  }
  for(std::size_t k = 0; k + 1 < p.size(); ++k)
  {
    if(arc[k + 1] < min_arc) continue;
    const Configuration& a = p.config(k);
    const Configuration& b = p.config(k + 1);
    const double len = arc[k + 1] - arc[k];
    double s_lo = len > 0.0 ? std::max(0.0, (min_arc - arc[k]) / len) : 0.0;
    double s = 0.0;
    if(len > 0.0) s = std::clamp((state - a).dot(b - a) / (len * len), s_lo, 1.0);
    Configuration q = interpolate(a, b, s);
    const double d = distance(state, q);
    if(d < best.distance - 1e-12)
    {
      best.distance = d;
      best.point = std::move(q);
      best.edge = k;
      best.arc = arc[k] + s * len;
    }
  }
  return best;
}

std::pair<Path, std::size_t> insertPoint(const Path& p, double arc, double snap)
{
  const auto& cum = p.arcLengths();
  arc = std::clamp(arc, 0.0, p.length());
  for(std::size_t k = 0; k < cum.size(); ++k)
    if(std::abs(cum[k] - arc) <= snap) return {p, k};
  auto it = std::upper_bound(cum.begin(), cum.end(), arc);
  const std::size_t edge = static_cast<std::size_t>(it - cum.begin()) - 1;
  std::vector<Node> nodes = p.nodes();
  nodes.insert(nodes.begin() + static_cast<long>(edge) + 1, Node{p.pointAt(arc), false});
  std::optional<ObstructedSpan> span = p.obstruction();
  if(span)
  {
    if(span->before > edge) ++span->before;
    if(span->after > edge) ++span->after;
  }
  return {Path(std::move(nodes), span), edge + 1};
}

Projection PathProjector::project(const Configuration& state, const Path& p)
{
  Projection pr = projectOnPath(state, p, last_arc_);
  last_arc_ = pr.arc;
  return pr;
}

std::optional<ObstructedSpan> CollisionReport::span() const
{
  if(!obstructed) return std::nullopt;
  return ObstructedSpan{before_index, after_index};
}

CollisionReport checkPath(const Path& p, const CollisionChecker& checker)
{
  CollisionReport report;
  report.checked_at = checker.snapshot()->time();
  std::optional<std::size_t> first, last;
  for(std::size_t k = 0; k + 1 < p.size(); ++k)
  {
    if(!checker.segmentFree(p.config(k), p.config(k + 1)))
    {
      if(!first) first = k;
      last = k;
    }
  }
  if(first)
  {
    report.obstructed = true;
    report.before_index = *first;
    report.after_index = *last + 1;
    report.x_before = Node{p.config(*first), false};
    report.x_after = Node{p.config(*last + 1), false};
  }
  return report;
}

void PathSet::validate() const
{
  require(!paths.empty(), "PathSet: no paths");
  require(current < paths.size(), "PathSet: current index out of range");
  for(const Path& p : paths)
    require(distance(p.back(), paths.front().back()) <= 1e-9, "PathSet: paths do not share the goal");
}

Path subdivide(const Path& p, double max_edge)
{
  require(max_edge > 0.0, "subdivide: max edge must be positive");
  std::vector<Node> nodes{p.nodes().front()};
  for(std::size_t k = 0; k + 1 < p.size(); ++k)
  {
    const double len = distance(p.config(k), p.config(k + 1));
    const auto parts = std::max<long>(1, static_cast<long>(std::ceil(len / max_edge)));
    for(long s = 1; s < parts; ++s)
      nodes.push_back({interpolate(p.config(k), p.config(k + 1), static_cast<double>(s) / parts), false});
    nodes.push_back(p.nodes()[k + 1]);
  }
  return Path(std::move(nodes));
}

}  // namespace replan
