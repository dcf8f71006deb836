#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpray {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input: config shape, bad arguments, unparseable expressions.
// CLI maps this to exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

// Expression syntax error, annotated with the byte offset into the source.
struct ParseError : ConfigError {
  ParseError(const std::string& msg, std::size_t offset)
      : ConfigError("parse error at offset " + std::to_string(offset) + ": " + msg),
        offset(offset) {}
  std::size_t offset;
};

// Mathematics failed at runtime: non-SPD metric, trapped ray, solver
// non-convergence, singular linear system.  CLI maps this to exit code 3.
struct NumericalError : Error {
  using Error::Error;
};

// Expression evaluated outside its domain (log of a nonpositive value, ...),
// annotated with the byte offset of the offending operation.
struct DomainError : NumericalError {
  DomainError(const std::string& msg, std::size_t offset)
      : NumericalError("domain error at offset " + std::to_string(offset) + ": " + msg),
        offset(offset) {}
  std::size_t offset;
};

}  // namespace mpray
