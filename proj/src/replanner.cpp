#include "replan/replanner.hpp"

#include <algorithm>
#include <numeric>

#include "replan/errors.hpp"

namespace replan
{

std::string toString(ReplanMode mode)
{
  return mode == ReplanMode::avoidance ? "avoidance" : "optimization";
}

TimeBudget TimeBudget::make(double reduced, double relaxed)
{
  require(reduced > 0.0 && reduced < relaxed, "TimeBudget: need 0 < reduced_time < relaxed_time");
  TimeBudget b;
  b.reduced_time = reduced;
  b.relaxed_time = relaxed;
  b.mode = ReplanMode::optimization;
  b.t_rp = relaxed;
  return b;
}

TimeBudget updateBudget(const CollisionReport& report, TimeBudget budget)
{
  budget.mode = report.obstructed ? ReplanMode::avoidance : ReplanMode::optimization;
  budget.t_rp = report.obstructed ? budget.reduced_time : budget.relaxed_time;
  return budget;
}

void CycleTimeTracker::record(double duration)
{
  durations_.push_back(duration);
  sum_ += duration;
}

double CycleTimeTracker::mean() const
{
  return durations_.empty() ? 0.0 : sum_ / static_cast<double>(durations_.size());
}

bool cycleGate(const CycleTimeTracker& tracker, double remaining, bool has_solution)
{
  if(!has_solution || tracker.empty()) return remaining > 0.0;
  return remaining > tracker.mean();
}

bool pruneCheck(const Configuration& x_n, const Configuration& x_j, double best_cost, double goal_tail_cost)
{
  if(!std::isfinite(best_cost)) return true;
  return distance(x_n, x_j) < best_cost - goal_tail_cost;
}

void CycleStats::add(double duration, bool success)
{
  ++cycles;
  if(success) ++successful;
  total_duration += duration;
  max_duration = std::max(max_duration, duration);
}

Path pathSwitch(const Configuration& x_n, const Path& sigma_i, const std::vector<Path>& P,
                const Deadline& deadline, ReplanContext& ctx, CycleStats* stats)
{
  const auto start_index = sigma_i.indexOf(x_n);
  require(start_index.has_value(), "pathSwitch: x_n is not a waypoint of sigma_i");
  Path best = subpath(sigma_i, *start_index, sigma_i.size() - 1);
  Clock& clock = ctx.planning.clock;
  CycleTimeTracker tracker;

  for(std::size_t j = 0; j < P.size(); ++j)
  {
    const Path& sigma_j = P[j];
    // Candidate nodes by distance from x_n; equal distances keep path order.
    std::vector<std::size_t> order(sigma_j.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> dist(sigma_j.size());
    for(std::size_t k = 0; k < sigma_j.size(); ++k) dist[k] = distance(x_n, sigma_j.config(k));
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });

    const Configuration* last_tried = nullptr;
    for(std::size_t k : order)
    {
      if(!cycleGate(tracker, deadline.remaining(), std::isfinite(best.cost()))) return best;

      const double tail = sigma_j.costFrom(k);
      if(!std::isfinite(tail)) continue;
      const Configuration& x_j = sigma_j.config(k);
      if(!pruneCheck(x_n, x_j, best.cost(), tail))
      {
        if(ctx.observer) ctx.observer->onPrune({x_n, x_j, j, k, tail, best.cost()});
        continue;
      }
      if(last_tried && distance(*last_tried, x_j) < ctx.merge_threshold) continue;
      last_tried = &x_j;

      const double max_cost = best.cost() - tail;
      const bool capped = std::isfinite(best.cost()) && !tracker.empty();
      const Deadline cycle_deadline = capped ? deadline.capped(tracker.mean()) : deadline;
      const double cycle_start = clock.now();
      std::optional<Path> conn = planInEllipsoid(x_n, x_j, max_cost, ctx.planning, cycle_deadline);
      const double duration = clock.now() - cycle_start;
      if(stats) stats->add(duration, conn.has_value());
      if(ctx.observer) ctx.observer->onCycle(duration, conn.has_value());
      if(!conn) continue;

      tracker.record(duration);
      if(strictlyCheaper(conn->cost() + tail, best.cost()))
        best = concat(*conn, subpath(sigma_j, k, sigma_j.size() - 1));
    }
  }
  return best;
}

namespace
{

// Applies a collision verdict computed for a (possibly older) remainder of
// the current path to sigma_cur, matching waypoints by configuration.
std::optional<ObstructedSpan> alignReport(const CollisionReport& report, const Path& sigma_cur)
{
  if(!report.obstructed || !report.x_after) return std::nullopt;
  const auto after = sigma_cur.indexOf(report.x_after->config);
  if(!after || *after == 0) return std::nullopt;  // obstruction already behind x_h
  std::size_t before = 0;
  if(report.x_before)
    if(auto b = sigma_cur.indexOf(report.x_before->config); b && *b < *after) before = *b;
  return ObstructedSpan{before, *after};
}

void markUsed(Path& p, const Configuration& q)
{
  for(std::size_t k = 0; k < p.size(); ++k)
    if(p.config(k) == q) p.markUsed(k);
}

}  // namespace

ReplanOutcome informedOnlineReplanning(const PathSet& S, const Configuration& x_h, const TimeBudget& budget,
                                       const CollisionReport& report, ReplanContext& ctx)
{
  S.validate();
  Clock& clock = ctx.planning.clock;
  const double t0 = clock.now();
  const Deadline deadline(clock, budget.t_rp);

  const Path& sigma_i = S.paths[S.current];
  std::size_t h_index = 0;
  Path sigma_i_h = sigma_i;
  if(auto k = sigma_i.indexOf(x_h)) h_index = *k;
  else
  {
    const Projection pr = projectOnPath(x_h, sigma_i);
    require(pr.distance <= 1e-9, "informedOnlineReplanning: x_h does not lie on the current path");
    std::tie(sigma_i_h, h_index) = insertPoint(sigma_i, pr.arc);
  }
  Path sigma_cur = subpath(sigma_i_h.withObstruction(std::nullopt), h_index, sigma_i_h.size() - 1);
  sigma_cur = sigma_cur.withObstruction(alignReport(report, sigma_cur));

  ReplanOutcome out;
  out.mode = budget.mode;
  out.t_rp = budget.t_rp;
  out.x_h = sigma_cur.front();
  out.cost_cur = sigma_cur.cost();
  out.length_cur = sigma_cur.length();
  out.snapshot_time = ctx.planning.checker.snapshot()->time();

  std::vector<Path> P;
  for(std::size_t k = 0; k < S.paths.size(); ++k)
    if(k != S.current) P.push_back(S.paths[k]);

  // Start nodes for path switching, in path order.
  std::vector<Configuration> Q;
  if(const auto& span = sigma_cur.obstruction())
  {
    P.push_back(subpath(sigma_cur, span->after, sigma_cur.size() - 1));
    for(std::size_t k = 0; k <= span->before; ++k) Q.push_back(sigma_cur.config(k));
  }
  else
  {
    P.push_back(sigma_cur);
    for(std::size_t k = 0; k < sigma_cur.size(); ++k) Q.push_back(sigma_cur.config(k));
  }

  Path sigma_rp = sigma_cur;
  double c_cur = sigma_cur.cost();
  bool improved = false;
  const Configuration& goal = sigma_cur.back();

  while(!Q.empty() && clock.now() - t0 < budget.t_rp)
  {
    std::size_t pick = 0;
    for(std::size_t k = 1; k < Q.size(); ++k)
      if(distance(Q[k], goal) < distance(Q[pick], goal)) pick = k;
    const Configuration x_n = Q[pick];

    // x_n sits on the incumbent when taken from its refill, otherwise on
    // sigma_cur. A refill node left behind by a later improvement is dropped.
    const bool on_rp = sigma_rp.indexOf(x_n).has_value();
    const Path& base = on_rp ? sigma_rp : sigma_cur;
    const auto found = base.indexOf(x_n);
    if(!found)
    {
      Q.erase(Q.begin() + static_cast<long>(pick));
      continue;
    }
    const std::size_t n_index = *found;
    const Deadline t_max(clock, budget.t_rp - (clock.now() - t0));
    Path sigma_switch = pathSwitch(x_n, base, P, t_max, ctx, &out.cycles);

    if(std::isfinite(sigma_switch.cost()))
    {
      Path prefix = subpath(base, 0, n_index);
      // The prefix ends at or before x_before, so it is free by construction.
      require(std::isfinite(prefix.cost()), "informedOnlineReplanning: obstructed prefix");
      Path sigma_new = concat(prefix, sigma_switch);
      if(strictlyCheaper(sigma_new.cost(), c_cur))
      {
        sigma_rp = std::move(sigma_new);
        c_cur = sigma_rp.cost();
        improved = true;
        out.incumbent_costs.push_back(c_cur);
      }
    }

    markUsed(sigma_cur, x_n);
    markUsed(sigma_rp, x_n);
    for(Path& p : P) markUsed(p, x_n);
    Q.erase(Q.begin() + static_cast<long>(pick));

    if(Q.empty() && improved)
    {
      for(const Node& node : sigma_rp.nodes())
        if(!node.already_used) Q.push_back(node.config);
    }
  }

  out.path = std::move(sigma_rp);
  out.improved = improved;
  out.elapsed = clock.now() - t0;
  return out;
}

}  // namespace replan
