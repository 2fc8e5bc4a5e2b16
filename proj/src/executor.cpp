#include "replan/executor.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <thread>

#include "replan/errors.hpp"
#include "replan/mailbox.hpp"

namespace replan
{

double Trajectory::arcAt(double t) const
{
  return std::clamp(speed * (t - start_time), 0.0, path->length());
}

Trajectory computeTrajectory(const Path& p, double speed, double start_time)
{
  require(!p.empty(), "computeTrajectory: empty path");
  require(std::isfinite(p.cost()), "computeTrajectory: path is obstructed");
  require(speed > 0.0 && std::isfinite(speed), "computeTrajectory: speed must be positive");
  Trajectory trj;
  trj.path = std::make_shared<const Path>(p.withObstruction(std::nullopt));
  trj.speed = speed;
  trj.duration = p.length() / speed;
  trj.start_time = start_time;
  return trj;
}

Configuration sampleTrajectory(const Trajectory& trj, double t)
{
  return trj.path->pointAt(trj.arcAt(t));
}

// ---------------------------------------------------------------------------
// Log

EpisodeLog::EpisodeLog(const EpisodeLog& other)
{
  std::lock_guard lock(other.mutex_);
  events_ = other.events_;
}

EpisodeLog& EpisodeLog::operator=(const EpisodeLog& other)
{
  if(this == &other) return *this;
  std::vector<Event> copy = other.events();
  std::lock_guard lock(mutex_);
  events_ = std::move(copy);
  return *this;
}

void EpisodeLog::append(double t, std::string type, nlohmann::json data)
{
  std::lock_guard lock(mutex_);
  events_.push_back(Event{t, std::move(type), std::move(data)});
}

std::vector<Event> EpisodeLog::events() const
{
  std::lock_guard lock(mutex_);
  return events_;
}

std::vector<Event> EpisodeLog::ofType(const std::string& type) const
{
  std::lock_guard lock(mutex_);
  std::vector<Event> out;
  for(const Event& e : events_)
    if(e.type == type) out.push_back(e);
  return out;
}

void EpisodeLog::write(std::ostream& os) const
{
  for(const Event& e : events())
  {
    nlohmann::json line = {{"t", e.t}, {"type", e.type}, {"data", e.data}};
    os << line.dump() << '\n';
  }
}

EpisodeLog EpisodeLog::read(std::istream& is)
{
  EpisodeLog log;
  std::string line;
  std::size_t lineno = 0;
  while(std::getline(is, line))
  {
    ++lineno;
    if(line.empty()) continue;
    nlohmann::json j;
    try
    {
      j = nlohmann::json::parse(line);
      log.append(j.at("t").get<double>(), j.at("type").get<std::string>(),
                 j.contains("data") ? j.at("data") : nlohmann::json::object());
    }
    catch(const nlohmann::json::exception& e)
    {
      throw std::runtime_error("episode log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return log;
}

nlohmann::json toJson(const Configuration& q)
{
  return std::vector<double>(q.data(), q.data() + q.size());
}

Configuration configurationFromJson(const nlohmann::json& j)
{
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

nlohmann::json toJson(const Path& p)
{
  nlohmann::json out = nlohmann::json::array();
  for(const Node& n : p.nodes()) out.push_back(toJson(n.config));
  return out;
}

nlohmann::json toJson(const Box& b)
{
  nlohmann::json out = {{"center", {b.center.x(), b.center.y(), b.center.z()}},
                        {"half_extents", {b.half_extents.x(), b.half_extents.y(), b.half_extents.z()}}};
  out["spawn_time"] = b.spawn_time ? nlohmann::json(*b.spawn_time) : nlohmann::json(nullptr);
  return out;
}

// ---------------------------------------------------------------------------
// Splicing

std::optional<Path> splice(const Configuration& state, double state_arc, const Path& current,
                           const Path& replanned, const CollisionChecker& checker)
{
  const Projection pr = projectOnPath(state, replanned);
  auto [rp, idx] = insertPoint(replanned, pr.arc);
  Path tail = subpath(rp, idx, rp.size() - 1);
  if(pr.distance <= 1e-9) return tail;

  if(checker.segmentFree(state, pr.point))
    return concat(Path::fromConfigurations({state, pr.point}), tail);

  // Back up along the current path to where the re-planned path starts.
  const Projection h = projectOnPath(replanned.front(), current);
  if(h.distance > 1e-9 || h.arc > state_arc) return std::nullopt;
  std::vector<Configuration> back{state};
  const auto& arcs = current.arcLengths();
  for(std::size_t k = current.size(); k-- > 0;)
    if(arcs[k] < state_arc - 1e-12 && arcs[k] > h.arc + 1e-12) back.push_back(current.config(k));
  back.push_back(replanned.front());
  for(std::size_t k = 0; k + 1 < back.size(); ++k)
    if(!checker.segmentFree(back[k], back[k + 1])) return std::nullopt;
  return concat(Path::fromConfigurations(back), replanned.withObstruction(std::nullopt));
}

// ---------------------------------------------------------------------------
// Episode

namespace
{

struct CollisionMessage
{
  WorldSnapshotPtr snapshot;
  std::shared_ptr<const Path> path;  // current path the report refers to
  CollisionReport report;            // for path[x_h, goal]
  std::vector<std::optional<ObstructedSpan>> spans;  // per path of the set
  TimeBudget budget;
};

struct PendingOutcome
{
  ReplanOutcome outcome;
  std::size_t id = 0;
  double start = 0.0;
  double finish = 0.0;
  double wall_time = 0.0;
  WorldSnapshotPtr snapshot;
};

// Per-edge verdicts of one path against one world version.
struct EdgeCache
{
  std::shared_ptr<const Path> path;
  std::size_t boxes = 0;
  std::vector<signed char> flags;  // -1 unknown, 0 free, 1 colliding
};

class EpisodeRunner
{
public:
  EpisodeRunner(const PathSet& S, EpisodeSetup setup)
    : setup_(std::move(setup)), cfg_(setup_.config), paths_(S.paths), current_index_(S.current)
  {
    S.validate();
    require(setup_.model != nullptr, "runEpisode: no robot model");
    require(cfg_.execution_rate > 0.0 && cfg_.collision_rate > 0.0, "runEpisode: loop rates must be positive");
    require(cfg_.reduced_time < cfg_.relaxed_time, "runEpisode: reduced time must be below relaxed time");
    std::seed_seq plan_seed{setup_.seed, std::uint64_t{0}};
    std::seed_seq spawn_seed{setup_.seed, std::uint64_t{1}};
    plan_rng_.seed(plan_seed);
    spawn_rng_.seed(spawn_seed);
    std::stable_sort(setup_.spawns.begin(), setup_.spawns.end(),
                     [](const ScheduledSpawn& a, const ScheduledSpawn& b) { return a.time < b.time; });

    goal_ = paths_.front().back();
    for(Path& p : paths_) p = p.withObstruction(std::nullopt);
    current_ = std::make_shared<const Path>(paths_[current_index_]);
    trj_ = computeTrajectory(*current_, cfg_.speed, 0.0);
    state_ = current_->front();
    base_budget_ = TimeBudget::make(cfg_.reduced_time, cfg_.relaxed_time);
    planner_params_ = cfg_.planner;
    planner_params_.iteration_cost = cfg_.wall_clock ? 0.0 : cfg_.work.iteration_cost;

    auto& log = result_.log;
    log.append(0.0, "episode-start",
               {{"dimension", setup_.model->dimension()}, {"paths", paths_.size()}, {"current", current_index_},
                {"speed", cfg_.speed}, {"seed", setup_.seed},
                {"clock", cfg_.wall_clock ? "wall" : "simulated"}});
    for(std::size_t k = 0; k < paths_.size(); ++k)
      log.append(0.0, "initial-path", {{"index", k}, {"current", k == current_index_}, {"waypoints", toJson(paths_[k])}});
    for(const Box& b : setup_.world.allBoxes()) log.append(0.0, "obstacle", toJson(b));
  }

  EpisodeResult run()
  {
    if(cfg_.wall_clock) runWallClock();
    else runSimulated();
    for(std::size_t k = next_spawn_; k < setup_.spawns.size(); ++k)
      result_.log.append(result_.end_time, "spawn-skipped", {{"time", setup_.spawns[k].time}});
    result_.world = setup_.world;
    return std::move(result_);
  }

private:
  // -- loops -----------------------------------------------------------------

  void runSimulated()
  {
    const double dt_exec = 1.0 / cfg_.execution_rate;
    const double dt_coll = 1.0 / cfg_.collision_rate;
    const double inf = std::numeric_limits<double>::infinity();
    std::uint64_t k_exec = 0, k_coll = 0;
    std::shared_ptr<const PendingOutcome> in_flight;

    while(!done_)
    {
      const double t_exec = static_cast<double>(k_exec) * dt_exec;
      const double t_coll = static_cast<double>(k_coll) * dt_coll;
      const double t_spawn = next_spawn_ < setup_.spawns.size() ? setup_.spawns[next_spawn_].time : inf;
      const double t_finish = in_flight ? in_flight->finish : inf;
      const double t = std::min({t_exec, t_coll, t_spawn, t_finish});
      if(t > cfg_.time_limit)
      {
        finish(cfg_.time_limit, "time-limit");
        break;
      }
      // Simultaneous events: spawn, collision check, re-plan completion, execution.
      if(t_spawn == t) spawnStep(t);
      else if(t_coll == t)
      {
        collisionStep(t);
        ++k_coll;
      }
      else if(t_finish == t)
      {
        outcomes_.publish(std::move(in_flight));
        in_flight = nullptr;
      }
      else
      {
        executionStep(t);
        ++k_exec;
        if(!done_ && !in_flight && outcomes_.empty()) in_flight = replanStep(t);
      }
    }
  }

  void runWallClock()
  {
    const WallClock clock;
    std::atomic<bool> stop{false};
    const auto origin = std::chrono::steady_clock::now();
    auto at = [&](double s) { return origin + std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(s)); };

    auto collision_loop = [&]() {
      for(std::uint64_t k = 0; !stop; ++k)
      {
        std::this_thread::sleep_until(at(static_cast<double>(k) / cfg_.collision_rate));
        if(stop) break;
        collisionStep(clock.now());
      }
    };
    auto replan_loop = [&]() {
      while(!stop)
      {
        if(!outcomes_.empty() || collisions_.empty())
        {
          std::this_thread::sleep_for(std::chrono::milliseconds(1));
          continue;
        }
        auto outcome = replanStep(clock.now());
        if(outcome) outcomes_.publish(std::move(outcome));
      }
    };

    std::jthread collision_thread(collision_loop);
    std::jthread replan_thread(replan_loop);
    for(std::uint64_t k = 0; !done_; ++k)
    {
      const double t = static_cast<double>(k) / cfg_.execution_rate;
      if(t > cfg_.time_limit)
      {
        finish(cfg_.time_limit, "time-limit");
        break;
      }
      std::this_thread::sleep_until(at(t));
      while(next_spawn_ < setup_.spawns.size() && setup_.spawns[next_spawn_].time <= t) spawnStep(t);
      executionStep(t);
    }
    stop = true;
  }

  // -- steps -----------------------------------------------------------------

  void spawnStep(double t)
  {
    const ScheduledSpawn& s = setup_.spawns[next_spawn_++];
    std::shared_ptr<const Path> path;
    double arc;
    Configuration state;
    {
      std::lock_guard lock(mutex_);
      path = current_;
      arc = stopped_ ? arc_ : trj_.arcAt(t);
      state = stopped_ ? state_ : path->pointAt(arc);
    }
    SpawnContext ctx{s.time, state, *path, arc, *setup_.model, spawn_rng_};
    std::optional<Box> box = s.policy ? s.policy(ctx) : std::nullopt;
    if(!box)
    {
      result_.log.append(t, "spawn-failed", {{"time", s.time}});
      return;
    }
    box->spawn_time = s.time;
    setup_.world.add(*box);
    result_.log.append(t, "obstacle", toJson(*box));
  }

  void collisionStep(double t)
  {
    std::shared_ptr<const Path> path;
    double arc;
    {
      std::lock_guard lock(mutex_);
      path = current_;
      arc = arc_;
    }
    auto msg = std::make_shared<CollisionMessage>();
    msg->snapshot = setup_.world.snapshot(t);
    msg->path = path;
    const CollisionChecker checker(msg->snapshot, setup_.model, cfg_.resolution, cfg_.monitor_padding);
    msg->report = checkRemainder(path, arc, checker, edge_cache_);
    msg->report.checked_at = t;
    msg->budget = updateBudget(msg->report, base_budget_);

    // Alternative paths only change verdict when the world does.
    const std::size_t boxes = msg->snapshot->boxes().size();
    if(boxes != spans_boxes_ || spans_.size() != paths_.size())
    {
      std::vector<Path> paths;
      {
        std::lock_guard lock(mutex_);
        paths = paths_;
      }
      spans_.assign(paths.size(), std::nullopt);
      for(std::size_t k = 0; k < paths.size(); ++k)
        spans_[k] = checkPath(paths[k], checker).span();
      spans_boxes_ = boxes;
    }
    msg->spans = spans_;

    if(msg->report.obstructed && !last_obstructed_)
      result_.log.append(t, "collision-detected",
                         {{"x_before", toJson(msg->report.x_before->config)},
                          {"x_after", toJson(msg->report.x_after->config)},
                          {"boxes", boxes}});
    if(!msg->report.obstructed && last_obstructed_) result_.log.append(t, "collision-cleared");
    last_obstructed_ = msg->report.obstructed;
    if(msg->budget.mode != last_mode_)
    {
      result_.log.append(t, "budget-change", {{"mode", toString(msg->budget.mode)}, {"t_rp", msg->budget.t_rp}});
      last_mode_ = msg->budget.mode;
    }
    collisions_.publish(std::move(msg));
  }

  void executionStep(double t)
  {
    std::lock_guard lock(mutex_);
    if(!stopped_)
    {
      arc_ = trj_.arcAt(t);
      state_ = current_->pointAt(arc_);
    }
    if(auto pending = outcomes_.take()) apply(*pending, t);

    result_.times.push_back(t);
    result_.traversed.push_back(state_);
    if(cfg_.log_states) result_.log.append(t, "state", {{"q", toJson(state_)}, {"stopped", stopped_}});
    if(distance(state_, goal_) <= cfg_.goal_tolerance) finish(t, "goal-reached");
  }

  std::shared_ptr<const PendingOutcome> replanStep(double t)
  {
    std::shared_ptr<const CollisionMessage> msg = collisions_.latest();
    PathSet S;
    double arc;
    std::shared_ptr<const Path> path;
    {
      std::lock_guard lock(mutex_);
      if(done_) return nullptr;
      S.paths = paths_;
      S.current = current_index_;
      arc = arc_;
      path = current_;
    }
    if(path->length() - arc <= cfg_.goal_tolerance) return nullptr;

    WorldSnapshotPtr snapshot = msg ? msg->snapshot : setup_.world.snapshot(t);
    for(std::size_t k = 0; k < S.paths.size(); ++k)
      if(k != S.current && msg && k < msg->spans.size()) S.paths[k] = S.paths[k].withObstruction(msg->spans[k]);
    auto [with_h, h_index] = insertPoint(*path, arc);
    S.paths[S.current] = with_h;
    const Configuration x_h = with_h.config(h_index);

    CollisionReport report;
    if(msg && msg->path == path) report = msg->report;
    else
    {
      // The path was swapped after the last collision check.
      const CollisionChecker checker(snapshot, setup_.model, cfg_.resolution, cfg_.monitor_padding);
      EdgeCache cache;
      report = checkRemainder(path, arc, checker, cache);
    }
    const TimeBudget budget = updateBudget(report, base_budget_);

    const std::size_t id = next_replan_id_++;
    result_.log.append(t, "replan-start",
                       {{"id", id}, {"mode", toString(budget.mode)}, {"t_rp", budget.t_rp}, {"x_h", toJson(x_h)},
                        {"snapshot_time", snapshot->time()}});

    WorkClock work_clock;
    WallClock wall_clock;
    Clock& clock = cfg_.wall_clock ? static_cast<Clock&>(wall_clock) : static_cast<Clock&>(work_clock);
    const CollisionChecker checker(snapshot, setup_.model, cfg_.resolution, cfg_.padding,
                                   cfg_.wall_clock ? nullptr : &work_clock, cfg_.work.check_cost);
    PlanningContext planning{checker, setup_.bounds, planner_params_, plan_rng_, clock};
    ReplanContext ctx{planning, cfg_.merge_threshold, nullptr};

    const auto wall_start = std::chrono::steady_clock::now();
    ReplanOutcome outcome = informedOnlineReplanning(S, x_h, budget, report, ctx);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();

    auto pending = std::make_shared<PendingOutcome>();
    pending->id = id;
    pending->start = t;
    pending->finish = t + outcome.elapsed;
    pending->wall_time = wall;
    pending->snapshot = snapshot;

    ReplanRecord rec;
    rec.id = id;
    rec.start = t;
    rec.finish = pending->finish;
    rec.mode = outcome.mode;
    rec.t_rp = outcome.t_rp;
    rec.elapsed = outcome.elapsed;
    rec.wall_time = wall;
    rec.mean_cycle = outcome.cycles.mean();
    rec.max_cycle = outcome.cycles.max_duration;
    rec.cycles = outcome.cycles.cycles;
    rec.feasible = outcome.feasible();
    rec.improved = outcome.improved;
    rec.cost_cur = outcome.cost_cur;
    rec.cost_rp = outcome.path.cost();
    rec.incumbent_costs = outcome.incumbent_costs;

    auto finite = [](double c) { return std::isfinite(c) ? nlohmann::json(c) : nlohmann::json(nullptr); };
    result_.log.append(pending->finish, "replan-done",
                       {{"id", id}, {"mode", toString(rec.mode)}, {"t_rp", rec.t_rp}, {"elapsed", rec.elapsed},
                        {"wall_time", wall}, {"cycles", rec.cycles}, {"mean_cycle", rec.mean_cycle},
                        {"max_cycle", rec.max_cycle}, {"feasible", rec.feasible}, {"improved", rec.improved},
                        {"cost_cur", finite(rec.cost_cur)}, {"length_cur", outcome.length_cur},
                        {"cost_rp", finite(rec.cost_rp)}, {"incumbent_costs", rec.incumbent_costs},
                        {"snapshot_time", snapshot->time()}});
    {
      std::lock_guard lock(mutex_);
      result_.replans.push_back(rec);
    }
    pending->outcome = std::move(outcome);
    return pending;
  }

  // -- helpers ---------------------------------------------------------------

  // Verdict for path[arc, goal]. Whole edges are cached per world version;
  // the partial edge holding the robot is checked every time.
  static CollisionReport checkRemainder(const std::shared_ptr<const Path>& path_ptr, double arc,
                                        const CollisionChecker& checker, EdgeCache& cache)
  {
    const Path& path = *path_ptr;
    const auto [with_h, h] = insertPoint(path, arc);
    const std::size_t boxes = checker.snapshot()->boxes().size();
    if(cache.path != path_ptr || cache.boxes != boxes)
    {
      cache.path = path_ptr;
      cache.boxes = boxes;
      cache.flags.assign(path.size(), -1);
    }
    // Edge k of the remainder maps to edge (k + h - shift) of the path.
    const std::size_t shift = with_h.size() - path.size();  // 1 when x_h was inserted
    std::optional<std::size_t> first, last;
    for(std::size_t k = h; k + 1 < with_h.size(); ++k)
    {
      bool colliding;
      if(k == h && shift == 1)
        colliding = !checker.segmentFree(with_h.config(k), with_h.config(k + 1));
      else
      {
        signed char& f = cache.flags[k - shift];
        if(f < 0) f = checker.segmentFree(path.config(k - shift), path.config(k - shift + 1)) ? 0 : 1;
        colliding = f == 1;
      }
      if(colliding)
      {
        if(!first) first = k - h;
        last = k - h;
      }
    }
    CollisionReport report;
    report.checked_at = checker.snapshot()->time();
    if(first)
    {
      report.obstructed = true;
      report.before_index = *first;
      report.after_index = *last + 1;
      report.x_before = Node{with_h.config(h + *first), false};
      report.x_after = Node{with_h.config(h + *last + 1), false};
    }
    return report;
  }

  // Called with mutex_ held.
  void apply(const PendingOutcome& pending, double t)
  {
    const ReplanOutcome& o = pending.outcome;
    if(!o.feasible())
    {
      if(o.mode == ReplanMode::avoidance && !stopped_)
      {
        stopped_ = true;
        ++result_.safety_stops;
        result_.log.append(t, "safety-stop", {{"id", pending.id}, {"q", toJson(state_)}});
      }
      return;
    }
    if(!o.improved)
    {
      if(stopped_) resume(t, pending.id);
      return;
    }

    const CollisionChecker checker(setup_.world.snapshot(t), setup_.model, cfg_.resolution, cfg_.padding);
    std::optional<Path> spliced = splice(state_, arc_, *current_, o.path, checker);
    if(!spliced)
    {
      result_.log.append(t, "swap-rejected", {{"id", pending.id}, {"reason", "no-connection"}});
      return;
    }
    auto latest = collisions_.latest();
    const bool obstructed = latest && latest->path == current_ && latest->report.obstructed;
    const double remaining = obstructed ? kInfiniteCost : current_->length() - arc_;
    if(o.mode == ReplanMode::optimization && !strictlyCheaper(spliced->cost(), remaining))
    {
      result_.log.append(t, "swap-rejected",
                         {{"id", pending.id}, {"reason", "not-cheaper"}, {"cost", spliced->cost()}, {"remaining", remaining}});
      return;
    }

    const double cost_before = remaining;
    paths_[current_index_] = *spliced;
    current_ = std::make_shared<const Path>(*spliced);
    trj_ = computeTrajectory(*current_, cfg_.speed, t);
    arc_ = 0.0;
    if(stopped_) resume(t, pending.id);

    AcceptedReplan acc;
    acc.replan_id = pending.id;
    acc.time = t;
    acc.mode = o.mode;
    acc.path = o.path;
    acc.snapshot_time = pending.snapshot->time();
    acc.length_cur = o.length_cur;
    acc.length_rp = o.path.length();
    acc.replan_time = o.elapsed;
    result_.accepted.push_back(acc);

    auto finite = [](double c) { return std::isfinite(c) ? nlohmann::json(c) : nlohmann::json(nullptr); };
    result_.log.append(t, "swap",
                       {{"id", pending.id}, {"mode", toString(o.mode)}, {"length_cur", o.length_cur},
                        {"length_rp", acc.length_rp}, {"cost_before", finite(cost_before)},
                        {"cost_after", spliced->cost()}, {"replan_time", o.elapsed},
                        {"wall_time", pending.wall_time}, {"snapshot_time", acc.snapshot_time},
                        {"waypoints", toJson(o.path)}, {"trajectory", toJson(*spliced)}});
  }

  void resume(double t, std::size_t id)
  {
    if(!stopped_) return;
    stopped_ = false;
    // Restart the trajectory from where the robot halted.
    trj_.start_time = t - arc_ / trj_.speed;
    result_.log.append(t, "resume", {{"id", id}});
  }

  void finish(double t, const char* reason)
  {
    done_ = true;
    result_.end_time = t;
    result_.goal_reached = std::string(reason) == "goal-reached";
    result_.log.append(t, reason, {{"q", toJson(state_)}});
  }

  EpisodeSetup setup_;
  const ExecutorConfig& cfg_;
  PlannerParams planner_params_;
  TimeBudget base_budget_;
  Rng plan_rng_;
  Rng spawn_rng_;
  Configuration goal_;

  std::mutex mutex_;  // guards the execution state below
  std::vector<Path> paths_;
  std::size_t current_index_;
  std::shared_ptr<const Path> current_;
  Trajectory trj_;
  Configuration state_;
  double arc_ = 0.0;
  bool stopped_ = false;
  std::atomic<bool> done_{false};

  LatestValue<CollisionMessage> collisions_;
  LatestValue<PendingOutcome> outcomes_;

  // Collision loop only.
  EdgeCache edge_cache_;
  std::vector<std::optional<ObstructedSpan>> spans_;
  std::size_t spans_boxes_ = 0;
  bool last_obstructed_ = false;
  ReplanMode last_mode_ = ReplanMode::optimization;

  std::size_t next_spawn_ = 0;
  std::size_t next_replan_id_ = 0;
  EpisodeResult result_;
};

}  // namespace

EpisodeResult runEpisode(const PathSet& S, EpisodeSetup setup)
{
  EpisodeRunner runner(S, std::move(setup));
  return runner.run();
}

}  // namespace replan
