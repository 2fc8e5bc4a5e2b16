#pragma once

#include <stdexcept>
#include <string>

namespace replan
{

/// Raised when a caller breaks an operation's precondition (dimension
/// mismatch, parameter out of range, node not on path, ...).
class ContractViolation : public std::invalid_argument
{
public:
  explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

inline void require(bool condition, const char* message)
{
  if(!condition) throw ContractViolation(message);
}

}  // namespace replan
