#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace neckflex {

// Malformed input data (CSV, config). line is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// An algorithm could not produce a result: quadrature or root bracketing failed,
// a fit is degenerate, a normalization reference is zero, and similar.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace neckflex
