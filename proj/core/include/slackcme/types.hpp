#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace slackcme {

/// Copy numbers of the modelled species, in species order.
using State = std::vector<int>;

/// Dense integer matrix stored row-major as nested vectors.
using IntMatrix = std::vector<std::vector<int>>;

/// Target sets are described by membership predicates so that the same
/// description works on finite state spaces and on unbounded SSA paths.
using StatePredicate = std::function<bool(std::span<const int>)>;

struct StateHash {
  std::size_t operator()(const State& s) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (int v : s) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
              message),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Invalid slack construction input (offset too small, bound below W x0, ...).
class SlackError : public Error {
 public:
  using Error::Error;
};

class StateSpaceError : public Error {
 public:
  using Error::Error;
};

/// A target set that cannot be reached from the initial state.
class AccessibilityError : public Error {
 public:
  using Error::Error;
};

/// A numerical solve missed its residual or mass tolerance.
class ToleranceError : public Error {
 public:
  ToleranceError(const std::string& message, double achieved)
      : Error(message), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace slackcme
