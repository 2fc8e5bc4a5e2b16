#pragma once

#include <memory>
#include <vector>

#include "replan/cspace.hpp"
#include "replan/paths.hpp"
#include "replan/planners.hpp"

namespace replan::testing
{

inline Configuration v3(double x, double y, double z)
{
  Configuration q(3);
  q << x, y, z;
  return q;
}

inline Box cube(double x, double y, double z, double half, std::optional<double> t = std::nullopt)
{
  return Box(Eigen::Vector3d(x, y, z), Eigen::Vector3d::Constant(half), t);
}

inline std::shared_ptr<const RobotModel> pointRobot()
{
  return std::make_shared<const RobotModel>(RobotModel::point(3));
}

inline SamplingBounds unitBounds(double half = 1.0)
{
  return SamplingBounds(Configuration::Constant(3, -half), Configuration::Constant(3, half));
}

/// Six-joint arm with the axis layout used by the cell scenario.
inline RobotModel sixJointArm()
{
  const Eigen::Vector3d axes[6] = {Eigen::Vector3d::UnitZ(), Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitY(),
                                   Eigen::Vector3d::UnitZ(), Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ()};
  const double lengths[6] = {0.4, 0.4, 0.3, 0.2, 0.1, 0.1};
  const double radii[6] = {0.05, 0.05, 0.05, 0.04, 0.04, 0.03};
  std::vector<Joint> joints;
  for(int k = 0; k < 6; ++k)
  {
    Joint j;
    j.axis = axes[k];
    j.offset = Eigen::Vector3d(0, 0, lengths[k]);
    j.capsule = {Eigen::Vector3d::Zero(), j.offset, radii[k]};
    j.lower = -3.0;
    j.upper = 3.0;
    joints.push_back(j);
  }
  return RobotModel::serialChain(joints);
}

/// Straight-edged path through the given 3D points.
inline Path polyline(std::initializer_list<Configuration> pts)
{
  return Path::fromConfigurations(std::vector<Configuration>(pts));
}

}  // namespace replan::testing
