#ifndef WOMLAB_ERRORS_HPP
#define WOMLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace womlab {

// A root-finding or iteration budget was exhausted before the tolerance held.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// f(lo) and f(hi) do not straddle the target.
struct BracketError : std::invalid_argument {
  explicit BracketError(const std::string& what) : std::invalid_argument(what) {}
};

// A (alpha, gamma) operating point has no steady-state solution.  The
// optimizers catch this and treat the point as +infinity.
struct InfeasibleError : std::domain_error {
  explicit InfeasibleError(const std::string& what) : std::domain_error(what) {}
};

// Garbage collection was invoked with no victim available in any pool.
struct GcDeadlockError : std::runtime_error {
  explicit GcDeadlockError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace womlab

#endif
