#pragma once

#include <stdexcept>
#include <string>

namespace uasn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a formula (negative distance, f <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed deployment, config or file content.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Link longer than the communication range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// No routing or placement satisfies the flow / lifetime constraints.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, int node = -1) : Error(what), node_(node) {}
  int node() const noexcept { return node_; }

 private:
  int node_;
};

}  // namespace uasn
