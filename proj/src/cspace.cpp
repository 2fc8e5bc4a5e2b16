#include "replan/cspace.hpp"

#include <algorithm>
#include <cmath>

#include "replan/errors.hpp"

namespace replan
{

double distance(const Configuration& a, const Configuration& b)
{
  require(a.size() == b.size(), "distance: dimension mismatch");
  return (a - b).norm();
}

Configuration interpolate(const Configuration& a, const Configuration& b, double s)
{
  require(a.size() == b.size(), "interpolate: dimension mismatch");
  require(s >= 0.0 && s <= 1.0, "interpolate: parameter outside [0,1]");
  if(s == 0.0) return a;
  if(s == 1.0) return b;
  return a + s * (b - a);
}

Box::Box(const Eigen::Vector3d& c, const Eigen::Vector3d& h, std::optional<double> t)
  : center(c), half_extents(h), spawn_time(t)
{
  require((h.array() > 0.0).all(), "Box: half extents must be positive");
  require(!t || *t >= 0.0, "Box: negative spawn time");
}

bool Box::contains(const Eigen::Vector3d& p) const
{
  return ((p - center).cwiseAbs().array() <= half_extents.array()).all();
}

double Box::distanceTo(const Eigen::Vector3d& p) const
{
  Eigen::Vector3d d = ((p - center).cwiseAbs() - half_extents).cwiseMax(0.0);
  return d.norm();
}

Box Box::inflated(double margin) const
{
  Box b = *this;
  b.half_extents.array() += margin;
  return b;
}

WorldSnapshot::WorldSnapshot(std::vector<Box> boxes, double time)
  : boxes_(std::move(boxes)), time_(time)
{
}

World::World(std::vector<Box> static_boxes) : boxes_(std::move(static_boxes)) {}

World::World(const World& other)
{
  std::lock_guard<std::mutex> lock(other.mutex_);
  boxes_ = other.boxes_;
}

World& World::operator=(const World& other)
{
  if(this == &other) return *this;
  std::vector<Box> copy = other.allBoxes();
  std::lock_guard<std::mutex> lock(mutex_);
  boxes_ = std::move(copy);
  return *this;
}

void World::add(const Box& box)
{
  std::lock_guard<std::mutex> lock(mutex_);
  boxes_.push_back(box);
}

WorldSnapshotPtr World::snapshot(double t) const
{
  std::vector<Box> active;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    for(const Box& b : boxes_)
      if(b.activeAt(t)) active.push_back(b);
  }
  return std::make_shared<const WorldSnapshot>(std::move(active), t);
}

std::vector<Box> World::allBoxes() const
{
  std::lock_guard<std::mutex> lock(mutex_);
  return boxes_;
}

RobotModel RobotModel::point(int dimension)
{
  require(dimension == 3, "RobotModel::point: a point robot lives in 3D");
  RobotModel m;
  m.kind_ = Kind::point;
  m.dimension_ = dimension;
  return m;
}

RobotModel RobotModel::serialChain(std::vector<Joint> joints, const Eigen::Vector3d& base)
{
  require(!joints.empty(), "RobotModel::serialChain: no joints");
  for(const Joint& j : joints)
  {
    require(j.axis.norm() > 0.0, "RobotModel::serialChain: zero joint axis");
    require(j.capsule.radius > 0.0, "RobotModel::serialChain: capsule radius must be positive");
    require(j.lower < j.upper, "RobotModel::serialChain: empty joint range");
  }
  RobotModel m;
  m.kind_ = Kind::serial_chain;
  m.dimension_ = static_cast<int>(joints.size());
  m.joints_ = std::move(joints);
  for(Joint& j : m.joints_) j.axis.normalize();
  m.base_ = base;
  return m;
}

double RobotModel::reach() const
{
  double r = 0.0;
  for(const Joint& j : joints_)
  {
    double extent = std::max({j.offset.norm(), j.capsule.a.norm(), j.capsule.b.norm()});
    r += extent;
  }
  return r;
}

double RobotModel::displacementBound() const
{
  if(kind_ == Kind::point) return 1.0;
  // R_k bounds the distance of any point of links k.. from joint k, hence
  // from its axis; moving joint k by dq displaces those points by <= R_k |dq|.
  double sum_sq = 0.0;
  for(std::size_t k = 0; k < joints_.size(); ++k)
  {
    double along = 0.0, r_k = 0.0;
    for(std::size_t m = k; m < joints_.size(); ++m)
    {
      const Joint& j = joints_[m];
      r_k = std::max(r_k, along + std::max(j.capsule.a.norm(), j.capsule.b.norm()) + j.capsule.radius);
      along += j.offset.norm();
    }
    sum_sq += r_k * r_k;
  }
  return std::sqrt(sum_sq);
}

void RobotModel::validate(const Configuration& q) const
{
  require(q.size() == dimension_, "configuration dimension does not match the robot model");
  require(q.allFinite(), "configuration has non-finite coordinates");
  if(kind_ == Kind::serial_chain)
  {
    for(int k = 0; k < dimension_; ++k)
      require(q[k] >= joints_[k].lower && q[k] <= joints_[k].upper,
              "configuration violates joint limits");
  }
}

namespace
{

template <typename Visitor>
void walkChain(const Configuration& q, const RobotModel& model, Visitor&& visit)
{
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d origin = model.base();
  const auto& joints = model.joints();
  for(std::size_t k = 0; k < joints.size(); ++k)
  {
    rotation = rotation * Eigen::AngleAxisd(q[static_cast<Eigen::Index>(k)], joints[k].axis).toRotationMatrix();
    visit(k, rotation, origin);
    origin += rotation * joints[k].offset;
  }
  visit(joints.size(), rotation, origin);
}

}  // namespace

std::vector<Capsule> forwardKinematics(const Configuration& q, const RobotModel& model)
{
  require(model.kind() == RobotModel::Kind::serial_chain, "forwardKinematics: model is not a serial chain");
  require(q.size() == model.dimension(), "forwardKinematics: dimension mismatch");
  std::vector<Capsule> capsules;
  capsules.reserve(model.joints().size());
  walkChain(q, model, [&](std::size_t k, const Eigen::Matrix3d& r, const Eigen::Vector3d& o) {
    if(k == model.joints().size()) return;
    const Capsule& local = model.joints()[k].capsule;
    capsules.push_back({o + r * local.a, o + r * local.b, local.radius});
  });
  return capsules;
}

Eigen::Vector3d toolPosition(const Configuration& q, const RobotModel& model)
{
  require(model.kind() == RobotModel::Kind::serial_chain, "toolPosition: model is not a serial chain");
  Eigen::Vector3d tip = model.base();
  walkChain(q, model, [&](std::size_t k, const Eigen::Matrix3d&, const Eigen::Vector3d& o) {
    if(k == model.joints().size()) tip = o;
  });
  return tip;
}

namespace
{

// Slab test of segment p + t (q - p), t in [0, 1], against an AABB.
bool segmentHitsBox(const Eigen::Vector3d& p, const Eigen::Vector3d& q,
                    const Eigen::Vector3d& center, const Eigen::Vector3d& half)
{
  double t0 = 0.0, t1 = 1.0;
  const Eigen::Vector3d d = q - p;
  for(int i = 0; i < 3; ++i)
  {
    const double lo = center[i] - half[i];
    const double hi = center[i] + half[i];
    if(std::abs(d[i]) < 1e-15)
    {
      if(p[i] < lo || p[i] > hi) return false;
      continue;
    }
    double ta = (lo - p[i]) / d[i];
    double tb = (hi - p[i]) / d[i];
    if(ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if(t0 > t1) return false;
  }
  return true;
}

bool capsuleHitsBox(const Capsule& c, const Box& box)
{
  Eigen::Vector3d grown = box.half_extents.array() + c.radius;
  if(!segmentHitsBox(c.a, c.b, box.center, grown)) return false;
  return segmentBoxDistance(c.a, c.b, box) <= c.radius;
}

}  // namespace

double segmentBoxDistance(const Eigen::Vector3d& p, const Eigen::Vector3d& q, const Box& box)
{
  if(segmentHitsBox(p, q, box.center, box.half_extents)) return 0.0;
  // Distance to a convex set along a line is convex in the line parameter.
  double lo = 0.0, hi = 1.0;
  auto f = [&](double t) { return box.distanceTo(p + t * (q - p)); };
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for(int it = 0; it < 80 && hi - lo > 1e-12; ++it)
  {
    if(f1 <= f2)
    {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - phi * (hi - lo); f1 = f(x1);
    }
    else
    {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + phi * (hi - lo); f2 = f(x2);
    }
  }
  return std::min({f(0.0), f(1.0), f1, f2});
}

bool configInCollision(const Configuration& q, const WorldSnapshot& world, const RobotModel& model)
{
  if(model.kind() == RobotModel::Kind::point)
  {
    require(q.size() == 3, "configInCollision: point robot configuration must be 3D");
    const Eigen::Vector3d p = q.head<3>();
    for(const Box& b : world.boxes())
      if(b.contains(p)) return true;
    return false;
  }
  if(world.boxes().empty()) return false;
  for(const Capsule& c : forwardKinematics(q, model))
    for(const Box& b : world.boxes())
      if(capsuleHitsBox(c, b)) return true;
  return false;
}

namespace
{

template <typename Pred>
bool anySampleOnSegment(const Configuration& a, const Configuration& b, double resolution, Pred&& pred)
{
  require(a.size() == b.size(), "segmentInCollision: dimension mismatch");
  require(resolution > 0.0, "segmentInCollision: resolution must be positive");
  const double length = (b - a).norm();
  if(pred(a)) return true;
  if(length == 0.0) return false;
  if(pred(b)) return true;
  const auto steps = static_cast<long>(std::ceil(length / resolution));
  for(long k = 1; k < steps; ++k)
  {
    const double s = std::min(1.0, static_cast<double>(k) * resolution / length);
    if(pred(interpolate(a, b, s))) return true;
  }
  return false;
}

}  // namespace

bool segmentInCollision(const Configuration& a, const Configuration& b,
                        const WorldSnapshot& world, const RobotModel& model, double resolution)
{
  return anySampleOnSegment(a, b, resolution,
                            [&](const Configuration& q) { return configInCollision(q, world, model); });
}

namespace
{

WorldSnapshotPtr padSnapshot(const WorldSnapshotPtr& snapshot, double padding)
{
  if(padding == 0.0) return snapshot;
  std::vector<Box> boxes;
  boxes.reserve(snapshot->boxes().size());
  for(const Box& b : snapshot->boxes()) boxes.push_back(b.inflated(padding));
  return std::make_shared<const WorldSnapshot>(std::move(boxes), snapshot->time());
}

}  // namespace

CollisionChecker::CollisionChecker(WorldSnapshotPtr snapshot, std::shared_ptr<const RobotModel> model,
                                   double resolution, double padding, Clock* clock, double check_cost)
  : snapshot_(std::move(snapshot)), model_(std::move(model)), resolution_(resolution),
    padding_(padding), clock_(clock), check_cost_(check_cost)
{
  require(snapshot_ && model_, "CollisionChecker: null snapshot or model");
  require(resolution_ > 0.0, "CollisionChecker: resolution must be positive");
  require(padding_ >= 0.0, "CollisionChecker: negative padding");
  padded_ = padSnapshot(snapshot_, padding_);
}

bool CollisionChecker::configFree(const Configuration& q) const
{
  if(clock_) clock_->charge(check_cost_);
  return !configInCollision(q, *padded_, *model_);
}

bool CollisionChecker::segmentFree(const Configuration& a, const Configuration& b) const
{
  return !anySampleOnSegment(a, b, resolution_, [&](const Configuration& q) { return !configFree(q); });
}

CollisionChecker CollisionChecker::withClock(Clock* clock, double check_cost) const
{
  CollisionChecker c = *this;
  c.clock_ = clock;
  c.check_cost_ = check_cost;
  return c;
}

}  // namespace replan
