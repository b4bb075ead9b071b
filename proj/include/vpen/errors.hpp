#pragma once

#include <stdexcept>
#include <string>

namespace vpen {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched dimensions, empty feasible sets, malformed shapes.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Eigensolver failure, all-infinite evaluations and similar.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed instance or configuration document. `where` is a JSON pointer.
class ParseError : public Error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where_(where) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace vpen
