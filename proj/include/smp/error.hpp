#pragma once

#include <stdexcept>
#include <string>

namespace smp {

// Raised when a caller breaks a documented precondition (shape mismatch,
// index out of range, inconsistent cache).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Raised for bad input data or infeasible requests: parse failures, splits
// that cannot be drawn, guards that trip.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the training loop when the loss stops being finite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int epoch, const std::string& what)
      : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractViolation(msg);
}

}  // namespace smp
