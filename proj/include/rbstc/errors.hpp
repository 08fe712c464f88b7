#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rbstc {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when an iterative numerical routine fails to converge.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, std::vector<double> residuals = {})
      : std::runtime_error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

// A standing assumption on the partition or the transition matrices fails
// (distinct IETs, trivial null-space intersection).
class AssumptionViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input is well formed but not in a form the routine handles.
class UnsupportedForm : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Preconditions of the stability classification do not hold for a candidate.
class HypothesisViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rbstc

namespace rbstc {

// The candidate is outside the forms the stability analysis covers.
class UnsupportedCandidate : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace rbstc
