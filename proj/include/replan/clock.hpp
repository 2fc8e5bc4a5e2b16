#pragma once

#include <chrono>
#include <limits>

namespace replan
{

/// Time source used to meter planner computation.
///
/// Planners read now() to enforce their budgets and call charge() for every
/// unit of work they perform. A wall clock ignores charges; a work clock is
/// advanced only by charges, which makes budgets reproducible.
class Clock
{
public:
  virtual ~Clock() = default;
  virtual double now() const = 0;
  virtual void charge(double /*seconds*/) {}
};

class WallClock : public Clock
{
public:
  WallClock() : origin_(std::chrono::steady_clock::now()) {}

  double now() const override
  {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - origin_).count();
  }

private:
  std::chrono::steady_clock::time_point origin_;
};

/// Virtual clock driven by a deterministic compute-cost model.
class WorkClock : public Clock
{
public:
  double now() const override { return elapsed_; }
  void charge(double seconds) override { elapsed_ += seconds; }

private:
  double elapsed_ = 0.0;
};

/// Cost, in virtual seconds, of the primitive operations planners perform.
struct WorkModel
{
  double check_cost = 5e-6;      ///< one configuration collision evaluation
  double iteration_cost = 2e-6;  ///< one sample/nearest/steer planner iteration
};

/// Absolute time limit on a clock. An unlimited deadline never expires.
class Deadline
{
public:
  Deadline(const Clock& clock, double budget)
    : clock_(&clock), end_(clock.now() + budget) {}

  static Deadline unlimited(const Clock& clock)
  {
    return Deadline(clock, std::numeric_limits<double>::infinity());
  }

  double remaining() const { return end_ - clock_->now(); }
  bool expired() const { return remaining() <= 0.0; }
  double end() const { return end_; }

  /// Tighter of this deadline and `budget` seconds from now.
  Deadline capped(double budget) const
  {
    Deadline d(*clock_, budget);
    if(end_ < d.end_) d.end_ = end_;
    return d;
  }

  const Clock& clock() const { return *clock_; }

private:
  const Clock* clock_;
  double end_;
};

}  // namespace replan
