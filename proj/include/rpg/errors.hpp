#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rpg {

// Vector/matrix dimensions disagree with the game layout.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation (sigma <= 0, W <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// NaN/inf encountered in data or during an iteration.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Point too close to the feasible-box boundary for a finite-difference stencil.
class BoundaryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rpg
