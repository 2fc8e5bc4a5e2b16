#pragma once

#include <memory>
#include <mutex>
#include <utility>

namespace replan
{

/// Single-slot mailbox holding the most recent immutable value. Publishing
/// overwrites whatever has not been read yet.
template <typename T>
class LatestValue
{
public:
  void publish(std::shared_ptr<const T> value)
  {
    std::lock_guard lock(mutex_);
    value_ = std::move(value);
  }

  std::shared_ptr<const T> latest() const
  {
    std::lock_guard lock(mutex_);
    return value_;
  }

  /// Returns the value and empties the slot.
  std::shared_ptr<const T> take()
  {
    std::lock_guard lock(mutex_);
    return std::exchange(value_, nullptr);
  }

  bool empty() const
  {
    std::lock_guard lock(mutex_);
    return !value_;
  }

private:
  mutable std::mutex mutex_;
  std::shared_ptr<const T> value_;
};

}  // namespace replan
