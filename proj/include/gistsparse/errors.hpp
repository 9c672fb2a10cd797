#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gistsparse {

/// Bad arguments: non-finite data, negative thresholds, out-of-range counts.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// A point outside the nonnegative orthant was evaluated under a
/// nonnegativity-constrained regularizer (objective is +infinity there).
class Infeasible : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The objective became non-finite during the iterations.
class Diverged : public std::runtime_error {
 public:
  Diverged(std::size_t iteration, const std::string& what)
      : std::runtime_error(what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

/// Path selection could not find a record matching the request.
class NoMatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace gistsparse
