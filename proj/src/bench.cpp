#include "replan/bench.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "replan/errors.hpp"

namespace replan
{

namespace fs = std::filesystem;

double qualityIndex(double cur_len, double new_len)
{
  require(std::isfinite(cur_len) && std::isfinite(new_len), "qualityIndex: lengths must be finite");
  require(cur_len > 0.0, "qualityIndex: current length must be positive");
  return 100.0 * (cur_len - new_len) / cur_len;
}

nlohmann::json MetricsRecord::toJson() const
{
  return {{"trial", trial},
          {"replan_id", replan_id},
          {"mode", toString(mode)},
          {"length_cur", length_cur},
          {"length_rp", length_rp},
          {"delta_percent", delta},
          {"replan_time_s", replan_time},
          {"replan_time_ms", replan_time * 1e3},
          {"timestamp", timestamp}};
}

MetricsRecord MetricsRecord::fromJson(const nlohmann::json& j)
{
  MetricsRecord r;
  r.trial = j.at("trial").get<std::size_t>();
  r.replan_id = j.at("replan_id").get<std::size_t>();
  const auto mode = j.at("mode").get<std::string>();
  if(mode != "avoidance" && mode != "optimization") throw std::runtime_error("unknown replan mode '" + mode + "'");
  r.mode = mode == "avoidance" ? ReplanMode::avoidance : ReplanMode::optimization;
  r.length_cur = j.at("length_cur").get<double>();
  r.length_rp = j.at("length_rp").get<double>();
  r.delta = j.at("delta_percent").get<double>();
  r.replan_time = j.at("replan_time_s").get<double>();
  r.timestamp = j.at("timestamp").get<double>();
  return r;
}

namespace
{

void meanStd(const std::vector<double>& v, double& mean, double& sd)
{
  mean = 0.0;
  sd = std::numeric_limits<double>::quiet_NaN();
  if(v.empty()) return;
  for(double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if(v.size() < 2) return;
  double ss = 0.0;
  for(double x : v) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
}

AggregateRow aggregateMode(const std::vector<MetricsRecord>& records, ReplanMode mode)
{
  std::vector<double> delta, time;
  for(const MetricsRecord& r : records)
    if(r.mode == mode)
    {
      delta.push_back(r.delta);
      time.push_back(r.replan_time);
    }
  AggregateRow row;
  row.count = delta.size();
  meanStd(delta, row.mean_delta, row.std_delta);
  meanStd(time, row.mean_time, row.std_time);
  return row;
}

nlohmann::json number(double x)
{
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

}  // namespace

AggregateTable aggregate(const std::vector<MetricsRecord>& records)
{
  return {aggregateMode(records, ReplanMode::avoidance), aggregateMode(records, ReplanMode::optimization)};
}

std::string renderTable(const AggregateTable& table, const std::string& title)
{
  const AggregateRow& a = table.avoidance;
  const AggregateRow& o = table.optimization;
  std::ostringstream os;
  char line[160];
  auto row = [&](const char* label, double x, double y, const char* fmt) {
    char xs[40], ys[40];
    std::snprintf(xs, sizeof xs, fmt, x);
    std::snprintf(ys, sizeof ys, fmt, y);
    std::snprintf(line, sizeof line, "%-24s %18s %18s\n", label, xs, ys);
    os << line;
  };
  os << title << '\n';
  std::snprintf(line, sizeof line, "%-24s %18s %18s\n", "", "Obstacle avoidance", "Path optimization");
  os << line;
  row("mean(delta) (%)", a.mean_delta, o.mean_delta, "%.3f");
  row("std(delta) (%)", a.std_delta, o.std_delta, "%.3f");
  row("mean(time) (s)", a.mean_time, o.mean_time, "%.5f");
  row("std(time) (s)", a.std_time, o.std_time, "%.5f");
  row("mean(time) (ms)", a.mean_time * 1e3, o.mean_time * 1e3, "%.3f");
  row("std(time) (ms)", a.std_time * 1e3, o.std_time * 1e3, "%.3f");
  row("number of re-plans", static_cast<double>(a.count), static_cast<double>(o.count), "%.0f");
  return os.str();
}

nlohmann::json toJson(const AggregateTable& table)
{
  auto row = [](const AggregateRow& r) {
    return nlohmann::json{{"count", r.count},
                          {"mean_delta_percent", number(r.mean_delta)},
                          {"std_delta_percent", number(r.std_delta)},
                          {"mean_time_s", number(r.mean_time)},
                          {"std_time_s", number(r.std_time)},
                          {"mean_time_ms", number(r.mean_time * 1e3)},
                          {"std_time_ms", number(r.std_time * 1e3)}};
  };
  return {{"avoidance", row(table.avoidance)}, {"optimization", row(table.optimization)}};
}

// ---------------------------------------------------------------------------
// Spawning

SpawnPolicy makeSpawnPolicy(const SpawnEvent& event, const Scenario& scenario)
{
  const Eigen::Vector3d half = Eigen::Vector3d::Constant(0.5 * event.side);
  const double padding = scenario.planning.padding;
  const double resolution = scenario.planning.resolution;
  const double clearance = scenario.robot_edge_clearance;
  const Configuration goal = scenario.goal;

  return [=](const SpawnContext& c) -> std::optional<Box> {
    if(event.placement == SpawnPlacement::fixed) return Box(*event.center, half);

    const auto model = std::make_shared<const RobotModel>(c.model);
    auto centerFor = [&](const Configuration& q) -> Eigen::Vector3d {
      if(model->kind() == RobotModel::Kind::point) return q.head<3>();
      return toolPosition(q, *model);
    };
    // The cube must leave the robot and the goal free.
    auto acceptable = [&](const Box& b) {
      const CollisionChecker checker(std::make_shared<const WorldSnapshot>(std::vector<Box>{b}, c.time), model,
                                     resolution, padding);
      return checker.configFree(c.state) && checker.configFree(goal);
    };

    const double length = c.current_path.length();
    if(event.placement == SpawnPlacement::robot_edge)
    {
      const double target = c.arc + clearance;
      if(target >= length) return std::nullopt;
      Box b(centerFor(c.current_path.pointAt(target)), half);
      return acceptable(b) ? std::optional<Box>(b) : std::nullopt;
    }

    // Uniform edge of the remaining path, uniform point on it, at least
    // `clearance` ahead of the robot.
    const auto [with_h, h] = insertPoint(c.current_path, c.arc);
    const std::size_t edges = with_h.size() - 1 - h;
    if(edges == 0) return std::nullopt;
    const auto& arcs = with_h.arcLengths();
    std::uniform_int_distribution<std::size_t> pick_edge(h, with_h.size() - 2);
    std::uniform_real_distribution<double> pick_s(0.0, 1.0);
    for(int attempt = 0; attempt < 100; ++attempt)
    {
      const std::size_t k = pick_edge(c.rng);
      const double s = pick_s(c.rng);
      const double arc = arcs[k] + s * (arcs[k + 1] - arcs[k]);
      if(arc < c.arc + clearance) continue;
      Box b(centerFor(interpolate(with_h.config(k), with_h.config(k + 1), s)), half);
      if(acceptable(b)) return b;
    }
    return std::nullopt;
  };
}

// ---------------------------------------------------------------------------
// Protocol

ExecutorConfig executorConfig(const Scenario& scenario, bool wall_clock)
{
  ExecutorConfig cfg = scenario.execution;
  cfg.wall_clock = wall_clock || cfg.wall_clock;
  return cfg;
}

std::optional<PathSet> planInitialPaths(const Scenario& scenario, Rng& rng)
{
  const auto model = std::make_shared<const RobotModel>(scenario.robot);
  const SamplingBounds bounds = scenario.bounds();
  const WorldSnapshotPtr world = scenario.staticWorld().snapshot(0.0);
  const WorkModel& work = scenario.execution.work;
  PlannerParams params = scenario.execution.planner;
  params.shortcut = false;
  params.iteration_cost = work.iteration_cost;

  PathSet S;
  for(std::size_t k = 0; k < scenario.planning.paths; ++k)
  {
    WorkClock clock;
    const CollisionChecker checker(world, model, scenario.planning.resolution, scenario.planning.padding, &clock,
                                   work.check_cost);
    PlanningContext ctx{checker, bounds, params, rng, clock};
    auto path = rrtConnect(scenario.start, scenario.goal, ctx,
                           Deadline(clock, scenario.planning.initial_connect_time));
    if(!path) return std::nullopt;
    Path refined = rrtStarOptimize(*path, ctx, Deadline(clock, scenario.planning.initial_optimize_time));
    S.paths.push_back(subdivide(refined, scenario.planning.initial_max_edge));
  }
  S.current = 0;
  return S;
}

TrialResult runTrial(const Scenario& scenario, std::size_t trial, std::uint64_t seed, bool wall_clock)
{
  TrialResult result;
  result.trial = trial;
  std::seed_seq seq{seed, static_cast<std::uint64_t>(trial)};
  Rng rng(seq);

  auto initial = planInitialPaths(scenario, rng);
  if(!initial)
  {
    result.skipped = true;
    result.skip_reason = "initial planning failed";
    return result;
  }
  result.initial = *initial;

  EpisodeSetup setup{std::make_shared<const RobotModel>(scenario.robot), scenario.bounds(), scenario.staticWorld(),
                     {}, executorConfig(scenario, wall_clock), rng()};
  for(const SpawnEvent& e : scenario.spawns)
    setup.spawns.push_back(ScheduledSpawn{e.time, makeSpawnPolicy(e, scenario)});
  result.episode = runEpisode(*initial, std::move(setup));

  for(const AcceptedReplan& a : result.episode.accepted)
  {
    if(!(a.length_cur > 0.0)) continue;
    MetricsRecord r;
    r.trial = trial;
    r.replan_id = a.replan_id;
    r.mode = a.mode;
    r.length_cur = a.length_cur;
    r.length_rp = a.length_rp;
    r.delta = qualityIndex(a.length_cur, a.length_rp);
    r.replan_time = a.replan_time;
    r.timestamp = a.time;
    result.records.push_back(r);
  }
  return result;
}

void ProtocolStats::add(const EpisodeResult& episode)
{
  ++trials_run;
  if(episode.goal_reached) ++goals_reached;
  safety_stops += episode.safety_stops;
  for(const ReplanRecord& r : episode.replans)
  {
    ++invocations;
    if(r.elapsed <= r.t_rp + r.mean_cycle + 1e-12) ++within_budget;
    if(r.mode == ReplanMode::avoidance)
    {
      ++avoidance_invocations;
      if(r.feasible) ++avoidance_feasible;
    }
  }
}

nlohmann::json ProtocolStats::toJson() const
{
  auto ratio = [](std::size_t a, std::size_t b) { return b ? nlohmann::json(double(a) / double(b)) : nlohmann::json(nullptr); };
  return {{"trials_run", trials_run},
          {"goals_reached", goals_reached},
          {"safety_stops", safety_stops},
          {"invocations", invocations},
          {"within_budget", within_budget},
          {"within_budget_ratio", ratio(within_budget, invocations)},
          {"avoidance_invocations", avoidance_invocations},
          {"avoidance_feasible", avoidance_feasible},
          {"avoidance_success_ratio", ratio(avoidance_feasible, avoidance_invocations)}};
}

ProtocolResult runProtocol(const Scenario& scenario, const ProtocolOptions& options)
{
  const std::size_t trials = options.trials.value_or(scenario.trials);
  const std::uint64_t seed = options.seed.value_or(scenario.seed);
  ProtocolResult out;
  for(std::size_t t = 0; t < trials; ++t)
  {
    TrialResult trial = runTrial(scenario, t, seed, options.wall_clock);
    if(trial.skipped) ++out.skipped;
    else out.stats.add(trial.episode);
    out.records.insert(out.records.end(), trial.records.begin(), trial.records.end());
    if(options.on_trial) options.on_trial(trial);
    if(options.keep_episodes) out.trials.push_back(std::move(trial));
  }
  out.table = aggregate(out.records);
  return out;
}

void writeMetrics(const std::vector<MetricsRecord>& records, std::ostream& os)
{
  for(const MetricsRecord& r : records) os << r.toJson().dump() << '\n';
}

std::vector<MetricsRecord> readMetrics(std::istream& is)
{
  std::vector<MetricsRecord> out;
  std::string line;
  while(std::getline(is, line))
    if(!line.empty()) out.push_back(MetricsRecord::fromJson(nlohmann::json::parse(line)));
  return out;
}

// ---------------------------------------------------------------------------
// Exports

namespace
{

std::ofstream openOut(const fs::path& file)
{
  std::ofstream os(file);
  if(!os) throw std::runtime_error("cannot write " + file.string());
  os << std::setprecision(12);
  return os;
}

void writeWaypoints(const nlohmann::json& waypoints, const fs::path& file)
{
  std::ofstream os = openOut(file);
  for(const auto& q : waypoints)
  {
    for(std::size_t k = 0; k < q.size(); ++k) os << (k ? " " : "") << q[k].get<double>();
    os << '\n';
  }
  if(!os) throw std::runtime_error("error writing " + file.string());
}

std::string numbered(const std::string& stem, std::size_t k, const char* ext)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03zu%s", stem.c_str(), k, ext);
  return buf;
}

}  // namespace

void exportPaths(const EpisodeLog& log, const fs::path& dir)
{
  fs::create_directories(dir / "initial_paths");
  std::ofstream obstacles = openOut(dir / "obstacles.txt");
  obstacles << "# cx cy cz hx hy hz spawn_time ('-' for static)\n";

  std::size_t swaps = 0;
  std::optional<std::ofstream> traversed;
  for(const Event& e : log.events())
  {
    if(e.type == "initial-path")
      writeWaypoints(e.data.at("waypoints"),
                     dir / "initial_paths" / ("path_" + std::to_string(e.data.at("index").get<std::size_t>()) + ".txt"));
    else if(e.type == "obstacle")
    {
      const auto& c = e.data.at("center");
      const auto& h = e.data.at("half_extents");
      for(int k = 0; k < 3; ++k) obstacles << c[k].get<double>() << ' ';
      for(int k = 0; k < 3; ++k) obstacles << h[k].get<double>() << ' ';
      if(e.data.at("spawn_time").is_null()) obstacles << "-\n";
      else obstacles << e.data.at("spawn_time").get<double>() << '\n';
    }
    else if(e.type == "swap")
    {
      fs::create_directories(dir / "replans");
      writeWaypoints(e.data.at("waypoints"), dir / "replans" / numbered("replan", swaps++, ".txt"));
    }
    else if(e.type == "state")
    {
      if(!traversed) traversed = openOut(dir / "traversed.txt");
      const auto& q = e.data.at("q");
      for(std::size_t k = 0; k < q.size(); ++k) *traversed << (k ? " " : "") << q[k].get<double>();
      *traversed << '\n';
    }
  }
  if(!obstacles) throw std::runtime_error("error writing " + (dir / "obstacles.txt").string());
  if(traversed && !*traversed) throw std::runtime_error("error writing " + (dir / "traversed.txt").string());
}

void writeProtocolOutputs(const Scenario& scenario, const ProtocolResult& result, const fs::path& dir)
{
  fs::create_directories(dir);
  {
    std::ofstream os = openOut(dir / "metrics.jsonl");
    writeMetrics(result.records, os);
  }
  {
    std::ofstream os = openOut(dir / "summary.txt");
    os << renderTable(result.table, "Results of scenario '" + scenario.name + "'");
    os << "trials skipped: " << result.skipped << '\n';
    os << result.stats.toJson().dump(2) << '\n';
  }
  {
    std::ofstream os = openOut(dir / "summary.json");
    nlohmann::json j = {{"scenario", scenario.name},
                        {"trials", result.trials.size()},
                        {"skipped", result.skipped},
                        {"table", toJson(result.table)},
                        {"stats", result.stats.toJson()}};
    os << j.dump(2) << '\n';
  }
  for(const TrialResult& t : result.trials)
  {
    const fs::path tdir = dir / "trials" / numbered("trial", t.trial, "");
    fs::create_directories(tdir);
    if(t.skipped)
    {
      std::ofstream os = openOut(tdir / "skipped.txt");
      os << t.skip_reason << '\n';
      continue;
    }
    {
      std::ofstream os = openOut(tdir / "episode.jsonl");
      t.episode.log.write(os);
    }
    exportPaths(t.episode.log, tdir);
  }
}

}  // namespace replan
