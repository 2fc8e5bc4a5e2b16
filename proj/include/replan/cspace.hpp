#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "replan/clock.hpp"

namespace replan
{

/// A point of the configuration space: joint angles (rad) for a serial chain,
/// Cartesian position (m) for a point robot.
using Configuration = Eigen::VectorXd;

double distance(const Configuration& a, const Configuration& b);

/// a + s (b - a), s in [0, 1].
Configuration interpolate(const Configuration& a, const Configuration& b, double s);

/// Axis-aligned box obstacle. Static boxes have no spawn time.
struct Box
{
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half_extents = Eigen::Vector3d::Constant(0.5);
  std::optional<double> spawn_time;

  Box() = default;
  Box(const Eigen::Vector3d& c, const Eigen::Vector3d& h, std::optional<double> t = std::nullopt);

  bool contains(const Eigen::Vector3d& p) const;
  double distanceTo(const Eigen::Vector3d& p) const;
  Box inflated(double margin) const;
  bool activeAt(double t) const { return !spawn_time || *spawn_time <= t; }
};

/// Immutable set of boxes active at one instant.
class WorldSnapshot
{
public:
  WorldSnapshot(std::vector<Box> boxes, double time);

  const std::vector<Box>& boxes() const { return boxes_; }
  double time() const { return time_; }

private:
  std::vector<Box> boxes_;
  double time_;
};

using WorldSnapshotPtr = std::shared_ptr<const WorldSnapshot>;

/// Static obstacles plus boxes that appear over time. Boxes are only ever
/// added; a snapshot at t2 >= t1 contains every box active at t1.
/// Safe to share between threads.
class World
{
public:
  World() = default;
  explicit World(std::vector<Box> static_boxes);
  World(const World& other);
  World& operator=(const World& other);

  /// Adds a box. Boxes without spawn time are static.
  void add(const Box& box);

  WorldSnapshotPtr snapshot(double t) const;
  std::vector<Box> allBoxes() const;

private:
  mutable std::mutex mutex_;
  std::vector<Box> boxes_;
};

struct Capsule
{
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  double radius = 0.0;
};

/// Revolute joint followed by a rigid link. The joint rotates about `axis`
/// (expressed in the parent frame); `offset` translates from this joint to
/// the next one, expressed in the rotated frame. The capsule is declared in
/// the rotated frame as well.
struct Joint
{
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
  Capsule capsule;
  double lower = -EIGEN_PI;
  double upper = EIGEN_PI;
};

class RobotModel
{
public:
  enum class Kind { point, serial_chain };

  static RobotModel point(int dimension = 3);
  static RobotModel serialChain(std::vector<Joint> joints,
                                const Eigen::Vector3d& base = Eigen::Vector3d::Zero());

  Kind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  const std::vector<Joint>& joints() const { return joints_; }
  const Eigen::Vector3d& base() const { return base_; }

  /// Sum of link offsets and capsule extents; upper bound on how far any
  /// point of the arm can be from the base.
  double reach() const;

  /// L such that no point of the robot moves more than L |q1 - q2| between
  /// two configurations (Euclidean joint distance).
  double displacementBound() const;

  /// Throws ContractViolation if q has the wrong dimension, is not finite or
  /// violates joint limits.
  void validate(const Configuration& q) const;

private:
  Kind kind_ = Kind::point;
  int dimension_ = 3;
  std::vector<Joint> joints_;
  Eigen::Vector3d base_ = Eigen::Vector3d::Zero();
};

/// World-frame capsules, one per link.
std::vector<Capsule> forwardKinematics(const Configuration& q, const RobotModel& model);

/// World position of the distal end of the last link.
Eigen::Vector3d toolPosition(const Configuration& q, const RobotModel& model);

/// Shortest distance between a segment and a box (zero when they touch).
double segmentBoxDistance(const Eigen::Vector3d& p, const Eigen::Vector3d& q, const Box& box);

bool configInCollision(const Configuration& q, const WorldSnapshot& world, const RobotModel& model);

/// Discrete check of the joint-space segment at `resolution`: samples
/// interpolate(a, b, k*resolution/|a-b|) for k = 0..ceil(|a-b|/resolution),
/// both endpoints included.
bool segmentInCollision(const Configuration& a, const Configuration& b,
                        const WorldSnapshot& world, const RobotModel& model, double resolution);

/// Collision queries bound to one snapshot. Boxes are inflated by `padding`,
/// and every configuration evaluation is charged to the clock when one is given.
class CollisionChecker
{
public:
  CollisionChecker(WorldSnapshotPtr snapshot, std::shared_ptr<const RobotModel> model,
                   double resolution, double padding = 0.0,
                   Clock* clock = nullptr, double check_cost = 0.0);

  bool configFree(const Configuration& q) const;
  bool segmentFree(const Configuration& a, const Configuration& b) const;

  /// Same checker charged to another clock.
  CollisionChecker withClock(Clock* clock, double check_cost) const;

  const WorldSnapshotPtr& snapshot() const { return snapshot_; }
  const WorldSnapshot& padded() const { return *padded_; }
  const RobotModel& model() const { return *model_; }
  const std::shared_ptr<const RobotModel>& modelPtr() const { return model_; }
  double resolution() const { return resolution_; }
  double padding() const { return padding_; }

private:
  WorldSnapshotPtr snapshot_;
  WorldSnapshotPtr padded_;
  std::shared_ptr<const RobotModel> model_;
  double resolution_;
  double padding_;
  Clock* clock_;
  double check_cost_;
};

}  // namespace replan
