#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adagmrf {

// Lattice too small or vector lengths that do not agree with a grid.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parameter outside the support of a distribution or prior.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Non-positive pivot encountered while factoring a banded matrix.
class FactorizationError : public std::runtime_error {
 public:
  FactorizationError(std::size_t pivot, double value)
      : std::runtime_error("banded Cholesky: non-positive pivot " +
                           std::to_string(value) + " at index " +
                           std::to_string(pivot)),
        pivot_(pivot) {}

  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

// A rejection sampler exceeded its iteration cap.
class RejectionLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A Gibbs sweep failed; carries the 1-based iteration index.
class StepError : public std::runtime_error {
 public:
  StepError(std::size_t iteration, const std::string& what)
      : std::runtime_error("iteration " + std::to_string(iteration) + ": " +
                           what),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

// Malformed input file. Row and column are 1-based; 0 means "not applicable".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, std::size_t row, std::size_t col,
             const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(row) + ":" +
                           std::to_string(col) + ": " + what),
        row_(row),
        col_(col) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

}  // namespace adagmrf
