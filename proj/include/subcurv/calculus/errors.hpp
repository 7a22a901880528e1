#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace subcurv {

/// Raised while evaluating an expression at a point.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-integer power of a non-positive base.
class NonSmoothPoint : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

/// Negative integer power of zero.
class DivisionByZero : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

/// |dφ|* fell below the singular threshold where a curvature was requested.
class SingularPoint : public EvaluationError {
 public:
  SingularPoint(double conorm, double threshold)
      : EvaluationError(message(threshold)), conorm_(conorm), threshold_(threshold) {}

  double conorm() const { return conorm_; }
  double threshold() const { return threshold_; }

 private:
  static std::string message(double threshold) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "singular point: |d\xcf\x86|* < %g", threshold);
    return buf;
  }
  double conorm_;
  double threshold_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace subcurv
