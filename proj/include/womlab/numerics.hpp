#ifndef WOMLAB_NUMERICS_HPP
#define WOMLAB_NUMERICS_HPP

#include <functional>
#include <span>
#include <vector>

namespace womlab::num {

struct BracketedInterval {
  double lo;
  double hi;
};

struct SolverConfig {
  double abs_tol = 1e-12;
  int max_iter = 200;
};

// Principal branch W0 of the Lambert W function: the solution w >= -1 of
// w*e^w = x for x >= -1/e.  Halley iteration from a series/asymptotic seed;
// a square-root branch-point expansion takes over for x within 1e-6 of -1/e,
// where Halley stalls.  Residual contract: |w*e^w - x| <= abs_tol*max(1,|x|).
//
// The secondary branch W_-1 is deliberately not provided: every use in this
// library evaluates arguments of the form -(1/a)e^{-c/a}, for which W_-1
// only reproduces the trivial fixed point (e.g. alpha' = 1).
double lambert_w0(double x, const SolverConfig& cfg = {});

// Solves f(x) = target on a bracketing interval.  Guaranteed-bracketing
// bisection with a secant acceleration step; stops when |f(x) - target|
// <= abs_tol.  Throws BracketError if f(lo) and f(hi) are on the same side
// of the target, ConvergenceError if max_iter is exhausted.
double solve_scalar(const std::function<double(double)>& f, double target,
                    BracketedInterval interval, const SolverConfig& cfg = {});

struct MinimizeResult {
  std::vector<double> point;
  double value;
};

// Box-constrained minimization by coarse grid scan plus local refinement:
// golden-section in 1-D, coordinate descent with golden-section line
// searches otherwise.  Objective evaluations that throw InfeasibleError /
// std::domain_error or return non-finite values count as +infinity.
// The result is never worse than the best point evaluated anywhere, so the
// value is <= the minimum of the scanned grid by construction.
MinimizeResult minimize_box(const std::function<double(std::span<const double>)>& f,
                            std::span<const BracketedInterval> box,
                            const SolverConfig& cfg = {});

// Convenience 1-D front end.
MinimizeResult minimize_scalar(const std::function<double(double)>& f,
                               BracketedInterval interval,
                               const SolverConfig& cfg = {});

// -p*log2(p) - (1-p)*log2(1-p), with 0*log(0) := 0.  Domain [0, 1].
double binary_entropy(double p);

// The unique p in [0, 0.5] with binary_entropy(p) = h.  Domain h in [0, 1].
// Bisection to full double precision in p (not just in h), so the round
// trip inverse(entropy(p)) = p holds tightly even near p = 0.5 where the
// entropy curve is flat.
double inverse_binary_entropy(double h);

}  // namespace womlab::num

#endif
