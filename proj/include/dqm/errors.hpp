#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dqm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: bad grid size, malformed problem, out-of-range order.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A weighting-coefficient construction produced non-finite values.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// LU factorization met a pivot below the singularity threshold.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(std::size_t pivot, const std::string& what)
      : Error(what), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// Syntax or unknown-symbol error while parsing an expression.
class ParseError : public Error {
 public:
  enum class Kind { Syntax, UnknownSymbol };
  ParseError(Kind kind, std::size_t position, const std::string& what)
      : Error(what + " at position " + std::to_string(position)),
        kind_(kind),
        position_(position) {}
  Kind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

/// Expression evaluation failed: unbound symbol or domain violation.
class EvalError : public Error {
 public:
  enum class Kind { UnboundSymbol, Domain };
  EvalError(Kind kind, std::size_t position, const std::string& what)
      : Error(what + " at position " + std::to_string(position)),
        kind_(kind),
        position_(position) {}
  Kind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

/// Newton iteration or shooting did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Two independent reference solutions disagree.
class OracleError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dqm
