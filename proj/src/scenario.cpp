#include "replan/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace replan
{

namespace
{

class Reader
{
public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& what) const
  {
    std::ostringstream os;
    os << source_;
    if(node.IsDefined() && node.Mark().line >= 0) os << ":" << node.Mark().line + 1;
    os << ": " << what;
    throw ScenarioError(os.str());
  }

  [[noreturn]] void fail(const std::string& what) const { throw ScenarioError(source_ + ": " + what); }

  void allowKeys(const YAML::Node& map, const std::string& where, std::initializer_list<const char*> keys) const
  {
    if(!map.IsMap()) fail(map, where + " must be a mapping");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for(const auto& kv : map)
    {
      const auto key = kv.first.as<std::string>();
      if(!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
    }
  }

  template <typename T>
  T scalar(const YAML::Node& node, const std::string& what) const
  {
    try
    {
      return node.as<T>();
    }
    catch(const YAML::Exception&)
    {
      fail(node, what + ": wrong type");
    }
  }

  template <typename T>
  T get(const YAML::Node& map, const char* key, T fallback) const
  {
    const YAML::Node n = map[key];
    return n ? scalar<T>(n, key) : fallback;
  }

  Eigen::VectorXd vector(const YAML::Node& node, const std::string& what, int size = -1) const
  {
    if(!node.IsSequence()) fail(node, what + " must be a list of numbers");
    if(size >= 0 && static_cast<int>(node.size()) != size)
      fail(node, what + " must have " + std::to_string(size) + " entries");
    Eigen::VectorXd v(static_cast<Eigen::Index>(node.size()));
    for(std::size_t k = 0; k < node.size(); ++k)
    {
      v(static_cast<Eigen::Index>(k)) = scalar<double>(node[k], what);
      if(!std::isfinite(v(static_cast<Eigen::Index>(k)))) fail(node[k], what + " must be finite");
    }
    return v;
  }

  Eigen::Vector3d vec3(const YAML::Node& node, const std::string& what) const
  {
    return vector(node, what, 3);
  }

  YAML::Node need(const YAML::Node& map, const char* key, const YAML::Node& context) const
  {
    YAML::Node n = map[key];
    if(!n) fail(context, std::string("missing required field '") + key + "'");
    return n;
  }

private:
  std::string source_;
};

RobotModel readRobot(const Reader& r, const YAML::Node& node, int dimension)
{
  r.allowKeys(node, "robot", {"kind", "base", "joints"});
  const auto kind = r.get<std::string>(node, "kind", "point");
  if(kind == "point")
  {
    if(node["joints"]) r.fail(node["joints"], "a point robot has no joints");
    return RobotModel::point(dimension);
  }
  if(kind != "serial_chain") r.fail(node["kind"], "robot kind must be 'point' or 'serial_chain'");

  const YAML::Node joints = r.need(node, "joints", node);
  if(!joints.IsSequence() || joints.size() == 0) r.fail(joints, "joints must be a non-empty list");
  std::vector<Joint> chain;
  for(const auto& j : joints)
  {
    r.allowKeys(j, "joint", {"axis", "offset", "radius", "capsule", "limits"});
    Joint joint;
    joint.axis = r.vec3(r.need(j, "axis", j), "joint axis");
    if(joint.axis.norm() < 1e-12) r.fail(j["axis"], "joint axis must be non-zero");
    joint.axis.normalize();
    joint.offset = r.vec3(r.need(j, "offset", j), "joint offset");
    joint.capsule.a = Eigen::Vector3d::Zero();
    joint.capsule.b = joint.offset;
    joint.capsule.radius = r.get<double>(j, "radius", 0.0);
    if(joint.capsule.radius < 0.0) r.fail(j["radius"], "capsule radius must be non-negative");
    if(const YAML::Node c = j["capsule"])
    {
      r.allowKeys(c, "capsule", {"a", "b"});
      joint.capsule.a = r.vec3(r.need(c, "a", c), "capsule a");
      joint.capsule.b = r.vec3(r.need(c, "b", c), "capsule b");
    }
    if(const YAML::Node l = j["limits"])
    {
      const Eigen::VectorXd lim = r.vector(l, "joint limits", 2);
      if(!(lim(0) < lim(1))) r.fail(l, "joint limits must be increasing");
      joint.lower = lim(0);
      joint.upper = lim(1);
    }
    chain.push_back(joint);
  }
  if(static_cast<int>(chain.size()) != dimension)
    r.fail(joints, "serial chain has " + std::to_string(chain.size()) + " joints but dimension is " +
                       std::to_string(dimension));
  const Eigen::Vector3d base = node["base"] ? r.vec3(node["base"], "robot base") : Eigen::Vector3d::Zero();
  return RobotModel::serialChain(std::move(chain), base);
}

Box readBox(const Reader& r, const YAML::Node& node)
{
  r.allowKeys(node, "obstacle", {"center", "half_extents", "size"});
  const Eigen::Vector3d c = r.vec3(r.need(node, "center", node), "obstacle center");
  Eigen::Vector3d h;
  if(node["half_extents"] && node["size"]) r.fail(node, "give either size or half_extents, not both");
  if(node["half_extents"]) h = r.vec3(node["half_extents"], "obstacle half_extents");
  else h = 0.5 * r.vec3(r.need(node, "size", node), "obstacle size");
  if((h.array() <= 0.0).any()) r.fail(node, "obstacle extents must be positive");
  return Box(c, h);
}

SpawnEvent readSpawn(const Reader& r, const YAML::Node& node)
{
  r.allowKeys(node, "spawn event", {"time", "side", "placement", "center"});
  SpawnEvent e;
  e.time = r.scalar<double>(r.need(node, "time", node), "spawn time");
  e.side = r.get<double>(node, "side", 0.05);
  if(!(e.side > 0.0)) r.fail(node["side"], "cube side must be positive");
  const auto placement = r.get<std::string>(node, "placement", "random_edge");
  if(placement == "random_edge") e.placement = SpawnPlacement::random_edge;
  else if(placement == "robot_edge") e.placement = SpawnPlacement::robot_edge;
  else if(placement == "fixed") e.placement = SpawnPlacement::fixed;
  else r.fail(node["placement"], "placement must be random_edge, robot_edge or fixed");
  if(e.placement == SpawnPlacement::fixed) e.center = r.vec3(r.need(node, "center", node), "spawn center");
  else if(node["center"]) r.fail(node["center"], "center is only used with fixed placement");
  return e;
}

}  // namespace

std::string toString(SpawnPlacement p)
{
  switch(p)
  {
    case SpawnPlacement::random_edge: return "random_edge";
    case SpawnPlacement::robot_edge: return "robot_edge";
    case SpawnPlacement::fixed: return "fixed";
  }
  return "unknown";
}

World Scenario::staticWorld() const
{
  return World(static_obstacles);
}

Scenario parseScenario(const std::string& text, const std::string& source)
{
  const Reader r(source);
  YAML::Node root;
  try
  {
    root = YAML::Load(text);
  }
  catch(const YAML::ParserException& e)
  {
    throw ScenarioError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if(!root.IsMap()) r.fail("top level must be a mapping");
  r.allowKeys(root, "scenario",
              {"name", "dimension", "bounds", "robot", "start", "goal", "static_obstacles", "spawn_schedule",
               "planning", "budgets", "execution", "compute_model", "protocol"});

  Scenario s;
  s.name = r.get<std::string>(root, "name", "unnamed");
  s.dimension = r.scalar<int>(r.need(root, "dimension", root), "dimension");
  if(s.dimension < 1) r.fail(root["dimension"], "dimension must be positive");

  s.robot = root["robot"] ? readRobot(r, root["robot"], s.dimension) : RobotModel::point(s.dimension);
  if(s.robot.kind() == RobotModel::Kind::point && s.dimension != 3)
    r.fail(root["dimension"], "a point robot lives in 3 dimensions");

  if(const YAML::Node b = root["bounds"])
  {
    r.allowKeys(b, "bounds", {"lower", "upper"});
    s.lower = r.vector(r.need(b, "lower", b), "bounds lower", s.dimension);
    s.upper = r.vector(r.need(b, "upper", b), "bounds upper", s.dimension);
    if(!(s.lower.array() < s.upper.array()).all()) r.fail(b, "bounds must satisfy lower < upper");
  }
  else if(s.robot.kind() == RobotModel::Kind::serial_chain)
  {
    s.lower.resize(s.dimension);
    s.upper.resize(s.dimension);
    for(int k = 0; k < s.dimension; ++k)
    {
      s.lower(k) = s.robot.joints()[static_cast<std::size_t>(k)].lower;
      s.upper(k) = s.robot.joints()[static_cast<std::size_t>(k)].upper;
    }
  }
  else r.fail(root, "missing required field 'bounds'");

  s.start = r.vector(r.need(root, "start", root), "start", s.dimension);
  s.goal = r.vector(r.need(root, "goal", root), "goal", s.dimension);

  if(const YAML::Node obs = root["static_obstacles"])
  {
    if(!obs.IsSequence()) r.fail(obs, "static_obstacles must be a list");
    for(const auto& o : obs) s.static_obstacles.push_back(readBox(r, o));
  }
  if(const YAML::Node sp = root["spawn_schedule"])
  {
    if(!sp.IsSequence()) r.fail(sp, "spawn_schedule must be a list");
    for(const auto& e : sp) s.spawns.push_back(readSpawn(r, e));
  }

  PlanningConfig& p = s.planning;
  std::optional<double> padding;
  if(const YAML::Node n = root["planning"])
  {
    r.allowKeys(n, "planning",
                {"paths", "resolution", "padding", "steer", "merge_threshold", "rejection_budget", "connector",
                 "shortcut", "connector_iterations", "initial_connect_time", "initial_optimize_time", "initial_max_edge"});
    p.paths = r.get<std::size_t>(n, "paths", p.paths);
    p.resolution = r.get<double>(n, "resolution", p.resolution);
    if(n["padding"]) padding = r.scalar<double>(n["padding"], "padding");
    p.steer = r.get<double>(n, "steer", p.steer);
    p.merge_threshold = r.get<double>(n, "merge_threshold", p.merge_threshold);
    p.rejection_budget = r.get<int>(n, "rejection_budget", p.rejection_budget);
    const auto connector = r.get<std::string>(n, "connector", "rrt_connect");
    if(connector == "rrt_connect") p.connector = ConnectorPlanner::rrt_connect;
    else if(connector == "rrt_star") p.connector = ConnectorPlanner::rrt_star;
    else r.fail(n["connector"], "connector must be rrt_connect or rrt_star");
    p.shortcut = r.get<bool>(n, "shortcut", p.shortcut);
    p.connector_iterations = r.get<int>(n, "connector_iterations", p.connector_iterations);
    p.initial_connect_time = r.get<double>(n, "initial_connect_time", p.initial_connect_time);
    p.initial_optimize_time = r.get<double>(n, "initial_optimize_time", p.initial_optimize_time);
    p.initial_max_edge = r.get<double>(n, "initial_max_edge", p.initial_max_edge);
    if(!(p.resolution > 0.0)) r.fail(n["resolution"], "resolution must be positive");
    if(!(p.steer > 0.0)) r.fail(n["steer"], "steer must be positive");
    if(p.merge_threshold < 0.0) r.fail(n["merge_threshold"], "merge_threshold must be non-negative");
    if(p.rejection_budget < 1) r.fail(n["rejection_budget"], "rejection_budget must be positive");
    if(!(p.initial_max_edge > 0.0)) r.fail(n["initial_max_edge"], "initial_max_edge must be positive");
  }
  // Boxes are inflated by half the robot displacement a resolution step can
  // cause for the collision loop, and by twice that for planning: a segment
  // the planner accepts is then free at every point for the collision loop,
  // and both stay sound against the real boxes.
  const double half_step = 0.5 * p.resolution * s.robot.displacementBound();
  p.padding = padding.value_or(2.0 * half_step);
  if(p.padding < 0.0) r.fail(root["planning"]["padding"], "padding must be non-negative");
  if(p.padding < 2.0 * half_step)
    s.warnings.push_back("planning.padding below the sound minimum " + std::to_string(2.0 * half_step));
  s.execution.monitor_padding = std::max(0.0, p.padding - half_step);

  ExecutorConfig& x = s.execution;
  if(const YAML::Node b = root["budgets"])
  {
    r.allowKeys(b, "budgets", {"reduced_time", "relaxed_time"});
    if(!b["reduced_time"] || !b["relaxed_time"])
      s.warnings.push_back("budgets incomplete; missing values default to 0.05 s / 0.1 s");
    x.reduced_time = r.get<double>(b, "reduced_time", 0.05);
    x.relaxed_time = r.get<double>(b, "relaxed_time", 0.1);
  }
  else
  {
    s.warnings.push_back("no budgets given; using reduced_time 0.05 s and relaxed_time 0.1 s");
    x.reduced_time = 0.05;
    x.relaxed_time = 0.1;
  }
  if(const YAML::Node e = root["execution"])
  {
    r.allowKeys(e, "execution",
                {"execution_rate", "collision_rate", "speed", "time_limit", "goal_tolerance", "robot_edge_clearance",
                 "wall_clock"});
    x.execution_rate = r.get<double>(e, "execution_rate", x.execution_rate);
    x.collision_rate = r.get<double>(e, "collision_rate", x.collision_rate);
    x.speed = r.get<double>(e, "speed", x.speed);
    x.time_limit = r.get<double>(e, "time_limit", x.time_limit);
    x.goal_tolerance = r.get<double>(e, "goal_tolerance", x.goal_tolerance);
    x.wall_clock = r.get<bool>(e, "wall_clock", false);
    s.robot_edge_clearance = r.get<double>(e, "robot_edge_clearance", s.robot_edge_clearance);
  }
  if(const YAML::Node c = root["compute_model"])
  {
    r.allowKeys(c, "compute_model", {"check_cost", "iteration_cost"});
    x.work.check_cost = r.get<double>(c, "check_cost", x.work.check_cost);
    x.work.iteration_cost = r.get<double>(c, "iteration_cost", x.work.iteration_cost);
    if(x.work.check_cost < 0.0 || x.work.iteration_cost < 0.0) r.fail(c, "compute costs must be non-negative");
  }
  if(const YAML::Node pr = root["protocol"])
  {
    r.allowKeys(pr, "protocol", {"trials", "seed"});
    s.trials = r.get<std::size_t>(pr, "trials", s.trials);
    s.seed = r.get<std::uint64_t>(pr, "seed", s.seed);
  }

  x.resolution = p.resolution;
  x.padding = p.padding;
  x.merge_threshold = p.merge_threshold;
  x.planner.steer = p.steer;
  x.planner.rejection_budget = p.rejection_budget;
  x.planner.connector = p.connector;
  x.planner.shortcut = p.shortcut;
  x.planner.connector_iterations = p.connector_iterations;

  try
  {
    validateScenario(s);
  }
  catch(const ScenarioError& e)
  {
    throw ScenarioError(source + ": " + e.what());
  }
  return s;
}

Scenario loadScenario(const std::string& file)
{
  std::ifstream in(file);
  if(!in) throw ScenarioError(file + ": cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parseScenario(buffer.str(), file);
}

void validateScenario(const Scenario& s)
{
  auto check = [](bool ok, const std::string& what) {
    if(!ok) throw ScenarioError(what);
  };
  const ExecutorConfig& x = s.execution;
  check(s.planning.paths >= 2, "planning.paths must be at least 2");
  check(x.reduced_time > 0.0 && x.reduced_time < x.relaxed_time, "budgets must satisfy 0 < reduced_time < relaxed_time");
  check(x.execution_rate > 0.0 && x.collision_rate > 0.0, "loop rates must be positive");
  check(x.speed > 0.0, "speed must be positive");
  check(x.time_limit > 0.0, "time_limit must be positive");
  check(x.goal_tolerance >= 0.0, "goal_tolerance must be non-negative");
  check(s.robot_edge_clearance >= 0.0, "robot_edge_clearance must be non-negative");
  for(const SpawnEvent& e : s.spawns)
    check(e.time >= 0.0 && e.time <= x.time_limit, "spawn time " + std::to_string(e.time) + " outside the episode");

  const SamplingBounds bounds = s.bounds();
  check(bounds.contains(s.start), "start lies outside the bounds");
  check(bounds.contains(s.goal), "goal lies outside the bounds");
  try
  {
    s.robot.validate(s.start);
    s.robot.validate(s.goal);
  }
  catch(const std::invalid_argument& e)
  {
    throw ScenarioError(std::string("start/goal: ") + e.what());
  }
  const WorldSnapshotPtr world = s.staticWorld().snapshot(0.0);
  const CollisionChecker checker(world, std::make_shared<RobotModel>(s.robot), s.planning.resolution,
                                 s.planning.padding);
  check(checker.configFree(s.start), "start is in collision with a static obstacle");
  check(checker.configFree(s.goal), "goal is in collision with a static obstacle");
}

}  // namespace replan
