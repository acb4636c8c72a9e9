#pragma once

#include <stdexcept>
#include <string>

namespace interlace {

// Violated operation precondition (bad argument, inconsistent parameters).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative method failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double last_residual)
      : std::runtime_error(what + " (last residual " + std::to_string(last_residual) + ")"),
        last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

// A machine-checked geometric or path postcondition failed. `claim` names it.
class VerificationError : public std::runtime_error {
 public:
  VerificationError(std::string claim, const std::string& detail)
      : std::runtime_error(claim + ": " + detail), claim_(std::move(claim)) {}
  const std::string& claim() const { return claim_; }

 private:
  std::string claim_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw PreconditionError(msg);
}

}  // namespace interlace
