#ifndef WOMLAB_ANALYTIC_MODELS_HPP
#define WOMLAB_ANALYTIC_MODELS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "womlab/numerics.hpp"

namespace womlab::model {

enum class System { baseline, naive_wom, cp_wom };

const char* system_name(System s);
std::optional<System> system_from_name(const std::string& name);

// Device geometry: Z pages per block, T physical pages, U logical pages.
struct SystemParams {
  int pages_per_block;    // Z
  long physical_pages;    // T
  long logical_pages;     // U

  double over_provisioning() const {  // rho = (T-U)/U
    return double(physical_pages - logical_pages) / double(logical_pages);
  }
  double storage_rate() const {  // alpha = U/T = 1/(rho+1)
    return double(logical_pages) / double(physical_pages);
  }
  long block_count() const { return physical_pages / pages_per_block; }

  // Throws std::invalid_argument unless Z >= 1, T is a multiple of Z, and
  // 0 < U < T.
  void validate() const;
};

// One evaluated (system, alpha, t) point: the erasure factor together with
// the internal steady-state variables that produced it.
struct AnalyticResult {
  System system;
  int writes;    // t
  double alpha;
  double ef;
  std::map<std::string, double> solution;
};

// A WOM code's rate profile.
struct WomCodeSpec {
  int writes;                 // t
  std::vector<double> rates;  // R_1..R_t
  bool fixed_rate;

  double sum_rate() const;
  // Checks rates > 0, fixed-rate uniformity, and sum-rate <= log2(t+1).
  void validate() const;
};

// Fixed-rate two-write bounds: the only fixed-rate sum-rate with a stored
// value.  kNaiveDefaultRate is the per-write rate 1.54/2.
inline constexpr double kFixedRateTwoWriteSumRate = 1.54;
inline constexpr double kNaiveDefaultRate = 0.77;

// Steady-state valid fraction alpha' = Y/Z of the baseline system:
// alpha' = -alpha * W0(-(1/alpha) e^{-1/alpha}), equivalently the root of
// alpha = (alpha'-1)/ln(alpha').  Domain alpha in (0, 1).
double alpha_prime(double alpha);

// Baseline erasure factor EF1(alpha) = 1/(1 - alpha').
AnalyticResult ef_baseline(double alpha);

// Naive-WOM erasure factor for a fixed-rate t-write code of per-write rate
// R: EF_t(alpha) = 1/(t (1 - beta')) with beta = alpha/R.  Requires
// alpha < R (beta must stay below 1).
AnalyticResult ef_naive(double alpha, double rate, int writes = 2);

// True iff the t=2 naive-WOM system has erasure factor <= the baseline's,
// i.e. 1 - alpha' <= 2 (1 - beta').
bool naive_beats_baseline(double alpha, double rate);

// Steady-state valid fraction gamma2 of a CP-WOM block at erase, given the
// stage-transition threshold gamma1:
//   gamma2 = -alpha W0(-(1/alpha) e^{ln((1+g1)/(2 g1)) + (g1-3)/(2 alpha)}).
// gamma1 = 0 is evaluated as the limit gamma1 -> 0+ (clamped to 1e-9).
// Throws InfeasibleError when the W argument falls below -1/e: that
// (alpha, gamma1) pair has no steady state and is never silently clamped.
double cp_gamma2(double alpha, double gamma1);

// CP-WOM erasure factor at a fixed threshold:
// EF2'(alpha, gamma1) = 1/(3/2 - gamma1/2 - gamma2).
AnalyticResult ef_cp_given_gamma1(double alpha, double gamma1);

// CP-WOM erasure factor minimized over gamma1 in [0, 1]; the solution map
// records the optimizing gamma1 and its gamma2.
AnalyticResult ef_cp_optimal(double alpha);

// t-write CP-WOM erasure factor: minimizes
//   EF_t' = 1 / (2 - 2^{1-t} - (sum_{j<t} gamma_j)/2 - gamma_t)
// over thresholds gamma_1..gamma_{t-1} in [0,1]^{t-1}, where gamma_t is
// recovered per candidate by bisection on
//   alpha = EF_t' denominator / sum_j ln((1+2^{j-2} gamma_{j-1})/(2^{j-1} gamma_j)),
// gamma_0 = 0.  Reduces exactly to ef_cp_optimal at t = 2 (by a different
// numerical route, which the tests exploit as a cross-check).
AnalyticResult ef_cp_multiwrite(double alpha, int writes);

// Membership in the two-write binary WOM capacity region
// C2 = {(R1,R2) | exists p in [0,0.5]: R1 <= h(p), R2 <= 1-p}.
bool capacity_contains(double rate1, double rate2);

// Maximum achievable sum-rate for t writes: log2(t+1) for variable-rate
// codes.  For fixed-rate codes only the t=2 constant 1.54 is known here;
// other t return nullopt.
std::optional<double> max_sum_rate(int writes, bool fixed_rate);

}  // namespace womlab::model

#endif
