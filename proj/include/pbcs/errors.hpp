#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pbcs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two objects that must share a shape or support do not.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver ran out of iterations. Carries the last bracket.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double bracket_lo, double bracket_hi)
      : Error(what + " [bracket " + std::to_string(bracket_lo) + ", " + std::to_string(bracket_hi) + "]"),
        lo_(bracket_lo),
        hi_(bracket_hi) {}

  double bracket_lo() const noexcept { return lo_; }
  double bracket_hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// Configuration failed validation. Every violated field is listed.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
      if (!out.empty()) out += "; ";
      out += item;
    }
    return out;
  }

  std::vector<std::string> problems_;
};

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pbcs
