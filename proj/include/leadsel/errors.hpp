#pragma once

#include <stdexcept>
#include <string>

namespace leadsel {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by loaders and constructors when Instance invariants do not hold.
class InvalidInstance : public Error {
 public:
  using Error::Error;
};

/// An assignment references UEs outside the instance or is not a partition.
class InvalidAssignment : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Strict-mode solve with no assignment satisfying C1-C3.
class Infeasible : public Error {
 public:
  using Error::Error;
};

class LimitExceeded : public Error {
 public:
  using Error::Error;
};

/// A node received an event its role/phase does not admit.
class ProtocolViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace leadsel
