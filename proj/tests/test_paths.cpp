#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "replan/errors.hpp"

using namespace replan;
using namespace replan::testing;

namespace
{

Path randomPath(std::mt19937_64& rng, int n)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Configuration> pts;
  for(int k = 0; k < n; ++k) pts.push_back(v3(u(rng), u(rng), u(rng)));
  return Path::fromConfigurations(pts);
}

// Point at arc s by walking the edges one by one.
Configuration walkTo(const Path& p, double s)
{
  for(std::size_t k = 0; k + 1 < p.size(); ++k)
  {
    const double len = (p.config(k + 1) - p.config(k)).norm();
    if(s <= len) return p.config(k) + (len > 0 ? s / len : 0.0) * (p.config(k + 1) - p.config(k));
    s -= len;
  }
  return p.back();
}

}  // namespace

TEST(Path, LengthAndCost)
{
  const Path p = polyline({v3(0, 0, 0), v3(1, 0, 0), v3(1, 1, 0)});
  EXPECT_DOUBLE_EQ(p.length(), 2.0);
  EXPECT_DOUBLE_EQ(p.cost(), 2.0);
  EXPECT_DOUBLE_EQ(p.costFrom(1), 1.0);
  const Path blocked = p.withObstruction(ObstructedSpan{0, 1});
  EXPECT_TRUE(std::isinf(blocked.cost()));
  EXPECT_TRUE(std::isinf(blocked.costFrom(0)));
  EXPECT_DOUBLE_EQ(blocked.costFrom(1), 1.0);
  EXPECT_THROW(p.withObstruction(ObstructedSpan{1, 1}), ContractViolation);
}

TEST(Path, PointAtMatchesEdgeWalk)
{
  std::mt19937_64 rng(1);
  for(int trial = 0; trial < 50; ++trial)
  {
    const Path p = randomPath(rng, 2 + trial % 7);
    for(int k = 0; k <= 100; ++k)
    {
      const double s = p.length() * k / 100.0;
      EXPECT_LT((p.pointAt(s) - walkTo(p, s)).norm(), 1e-9);
    }
    EXPECT_EQ(p.pointAt(-1.0), p.front());
    EXPECT_EQ(p.pointAt(p.length() + 1.0), p.back());
  }
}

TEST(Path, SubpathClipsObstruction)
{
  const Path p = polyline({v3(0, 0, 0), v3(1, 0, 0), v3(2, 0, 0), v3(3, 0, 0), v3(4, 0, 0)})
                     .withObstruction(ObstructedSpan{1, 3});
  const Path head = subpath(p, 0, 1);
  EXPECT_FALSE(head.obstructed());
  EXPECT_DOUBLE_EQ(head.cost(), 1.0);
  const Path mid = subpath(p, 2, 4);
  ASSERT_TRUE(mid.obstructed());
  EXPECT_EQ(mid.obstruction()->before, 0u);
  EXPECT_EQ(mid.obstruction()->after, 1u);
  EXPECT_FALSE(subpath(p, 3, 4).obstructed());
  EXPECT_THROW(subpath(p, 3, 1), ContractViolation);
  EXPECT_EQ(subpath(p, Node{v3(1, 0, 0)}, Node{v3(3, 0, 0)}).size(), 3u);
  EXPECT_THROW(subpath(p, Node{v3(9, 0, 0)}, Node{v3(3, 0, 0)}), ContractViolation);
}

TEST(Path, ConcatSharesJunction)
{
  const Path a = polyline({v3(0, 0, 0), v3(1, 0, 0)});
  const Path b = polyline({v3(1, 0, 0), v3(1, 1, 0), v3(1, 2, 0)});
  const Path c = concat(a, b);
  EXPECT_EQ(c.size(), 4u);
  EXPECT_DOUBLE_EQ(c.length(), 3.0);
  EXPECT_THROW(concat(b, a), ContractViolation);
  const Path blocked = concat(a, b.withObstruction(ObstructedSpan{0, 1}));
  ASSERT_TRUE(blocked.obstructed());
  EXPECT_EQ(blocked.obstruction()->before, 1u);
  EXPECT_EQ(blocked.obstruction()->after, 2u);
}

TEST(Path, ConcatLengthIsAdditive)
{
  std::mt19937_64 rng(2);
  for(int trial = 0; trial < 50; ++trial)
  {
    const Path a = randomPath(rng, 3);
    std::vector<Configuration> pts{a.back()};
    for(const auto& q : randomPath(rng, 4).configurations()) pts.push_back(q);
    const Path b = Path::fromConfigurations(pts);
    EXPECT_NEAR(concat(a, b).length(), a.length() + b.length(), 1e-12);
  }
}

TEST(Path, InsertPoint)
{
  const Path p = polyline({v3(0, 0, 0), v3(1, 0, 0), v3(2, 0, 0)}).withObstruction(ObstructedSpan{1, 2});
  auto [q, k] = insertPoint(p, 0.25);
  EXPECT_EQ(k, 1u);
  EXPECT_EQ(q.size(), 4u);
  EXPECT_TRUE(q.config(1).isApprox(v3(0.25, 0, 0)));
  EXPECT_DOUBLE_EQ(q.length(), p.length());
  EXPECT_EQ(q.obstruction()->before, 2u);
  EXPECT_EQ(q.obstruction()->after, 3u);
  auto [same, j] = insertPoint(p, 1.0);
  EXPECT_EQ(j, 1u);
  EXPECT_EQ(same.size(), 3u);
}

TEST(Projection, ClosestPointAndMinArc)
{
  // Path doubling back over itself: the later branch is chosen past min_arc.
  const Path p = polyline({v3(0, 0, 0), v3(2, 0, 0), v3(2, 0.2, 0), v3(0, 0.2, 0)});
  const Projection first = projectOnPath(v3(1, 0.05, 0), p);
  EXPECT_NEAR(first.arc, 1.0, 1e-12);
  EXPECT_EQ(first.edge, 0u);
  EXPECT_NEAR(first.distance, 0.05, 1e-12);
  const Projection later = projectOnPath(v3(1, 0.05, 0), p, 2.0);
  EXPECT_NEAR(later.arc, 3.2, 1e-12);
  EXPECT_EQ(later.edge, 2u);

  PathProjector tracker;
  double last = 0.0;
  for(int k = 0; k <= 42; ++k)
  {
    const Projection pr = tracker.project(p.pointAt(k * 0.1), p);
    EXPECT_GE(pr.arc, last);
    EXPECT_NEAR(pr.arc, std::min(k * 0.1, p.length()), 1e-9);
    last = pr.arc;
  }
}

TEST(CheckPath, SpanBracketsAllCollisions)
{
  auto world = std::make_shared<const WorldSnapshot>(
      std::vector<Box>{cube(1.5, 0, 0, 0.1), cube(3.5, 0, 0, 0.1)}, 0.0);
  CollisionChecker checker(world, pointRobot(), 0.01);
  const Path p = polyline({v3(0, 0, 0), v3(1, 0, 0), v3(2, 0, 0), v3(3, 0, 0), v3(4, 0, 0), v3(5, 0, 0)});
  const CollisionReport r = checkPath(p, checker);
  ASSERT_TRUE(r.obstructed);
  EXPECT_EQ(r.before_index, 1u);
  EXPECT_EQ(r.after_index, 4u);
  EXPECT_EQ(r.x_before->config, p.config(1));
  EXPECT_EQ(r.x_after->config, p.config(4));
  EXPECT_FALSE(checkPath(subpath(p, 4, 5), checker).obstructed);
}

TEST(PathSet, SharedGoal)
{
  PathSet S{{polyline({v3(0, 0, 0), v3(1, 0, 0)}), polyline({v3(0, 1, 0), v3(1, 0, 0)})}, 0};
  EXPECT_NO_THROW(S.validate());
  S.paths.push_back(polyline({v3(0, 0, 0), v3(1, 1, 0)}));
  EXPECT_THROW(S.validate(), ContractViolation);
  S.paths.pop_back();
  S.current = 2;
  EXPECT_THROW(S.validate(), ContractViolation);
}

TEST(Subdivide, PreservesGeometry)
{
  std::mt19937_64 rng(4);
  for(int trial = 0; trial < 30; ++trial)
  {
    const Path p = randomPath(rng, 4);
    const Path q = subdivide(p, 0.1);
    EXPECT_NEAR(q.length(), p.length(), 1e-9);
    EXPECT_EQ(q.front(), p.front());
    EXPECT_EQ(q.back(), p.back());
    for(std::size_t k = 0; k + 1 < q.size(); ++k) EXPECT_LE(distance(q.config(k), q.config(k + 1)), 0.1 + 1e-12);
    for(const auto& c : p.configurations()) EXPECT_TRUE(q.indexOf(c).has_value());
  }
}
