#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace passk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input record. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A replay-backed source ran out of recorded outcomes.
class SourceExhausted : public Error {
 public:
  SourceExhausted(std::size_t problem, std::int64_t step)
      : Error("outcome pool exhausted for problem " + std::to_string(problem) + " at step " +
              std::to_string(step)),
        problem_(problem),
        step_(step) {}
  std::size_t problem() const noexcept { return problem_; }
  std::int64_t step() const noexcept { return step_; }

 private:
  std::size_t problem_;
  std::int64_t step_;
};

/// Numerical procedure failed (cancellation, quadrature non-convergence, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace passk
