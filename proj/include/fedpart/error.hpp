#pragma once

#include <stdexcept>
#include <string>

namespace fedpart {

/// Failure categories. Each maps onto a CLI exit code.
enum class ErrorKind {
  Usage,      ///< invalid input or arguments (exit 2)
  Capacity,   ///< instance exceeds a configured cap (exit 3)
  Numerical,  ///< solver failed to certify or converge (exit 4)
  Internal    ///< broken invariant, should not happen
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error(ErrorKind::Capacity, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what) : Error(ErrorKind::Internal, what) {}
};

inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Usage: return 2;
    case ErrorKind::Capacity: return 3;
    case ErrorKind::Numerical: return 4;
    case ErrorKind::Internal: return 1;
  }
  return 1;
}

}  // namespace fedpart
