#include "womlab/analytic_models.hpp"

#include <cmath>
#include <sstream>

#include "womlab/errors.hpp"

namespace womlab::model {

namespace {

constexpr double kInvE = 0.36787944117144233;
constexpr double kGamma1Floor = 1e-9;  // gamma -> 0+ limit clamp

void require_open_unit(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream msg;
    msg << who << ": alpha must lie in (0, 1), got " << alpha;
    throw std::domain_error(msg.str());
  }
}

}  // namespace

const char* system_name(System s) {
  switch (s) {
    case System::baseline: return "baseline";
    case System::naive_wom: return "naive_wom";
    case System::cp_wom: return "cp_wom";
  }
  return "?";
}

std::optional<System> system_from_name(const std::string& name) {
  if (name == "baseline") return System::baseline;
  if (name == "naive_wom" || name == "naive") return System::naive_wom;
  if (name == "cp_wom" || name == "cp") return System::cp_wom;
  return std::nullopt;
}

void SystemParams::validate() const {
  if (pages_per_block < 1) throw std::invalid_argument("SystemParams: Z must be >= 1");
  if (physical_pages % pages_per_block != 0) {
    throw std::invalid_argument("SystemParams: T must be a multiple of Z");
  }
  if (!(logical_pages > 0 && logical_pages < physical_pages)) {
    throw std::invalid_argument("SystemParams: need 0 < U < T");
  }
}

double WomCodeSpec::sum_rate() const {
  double s = 0.0;
  for (double r : rates) s += r;
  return s;
}

void WomCodeSpec::validate() const {
  if (writes < 1 || rates.size() != static_cast<std::size_t>(writes)) {
    throw std::invalid_argument("WomCodeSpec: need one rate per write");
  }
  for (double r : rates) {
    if (!(r > 0.0)) throw std::invalid_argument("WomCodeSpec: rates must be positive");
  }
  if (fixed_rate) {
    for (double r : rates) {
      if (r != rates.front()) {
        throw std::invalid_argument("WomCodeSpec: fixed-rate code with unequal rates");
      }
    }
  }
  if (sum_rate() > std::log2(double(writes) + 1.0) + 1e-12) {
    throw std::invalid_argument("WomCodeSpec: sum-rate exceeds log2(t+1)");
  }
}

double alpha_prime(double alpha) {
  require_open_unit(alpha, "alpha_prime");
  // -(1/a) e^{-1/a}, evaluated in log form to survive small alpha.
  const double arg = -std::exp(-1.0 / alpha - std::log(alpha));
  if (arg < -kInvE) {
    // Round-off can push the argument a hair past the branch point as
    // alpha -> 1; lambert_w0 tolerates that within its own abs_tol.
    return -alpha * num::lambert_w0(std::max(arg, -kInvE));
  }
  return -alpha * num::lambert_w0(arg);
}

AnalyticResult ef_baseline(double alpha) {
  const double ap = alpha_prime(alpha);
  AnalyticResult r;
  r.system = System::baseline;
  r.writes = 1;
  r.alpha = alpha;
  r.ef = 1.0 / (1.0 - ap);
  r.solution["alpha_prime"] = ap;
  return r;
}

AnalyticResult ef_naive(double alpha, double rate, int writes) {
  require_open_unit(alpha, "ef_naive");
  if (!(rate > 0.0 && rate <= 1.0)) throw std::domain_error("ef_naive: rate must lie in (0, 1]");
  if (writes < 1) throw std::domain_error("ef_naive: need t >= 1");
  const double beta = alpha / rate;
  if (beta >= 1.0) {
    std::ostringstream msg;
    msg << "ef_naive: alpha=" << alpha << " >= rate=" << rate
        << " leaves no over-provisioning (beta >= 1)";
    throw std::domain_error(msg.str());
  }
  const double bp = alpha_prime(beta);
  AnalyticResult r;
  r.system = System::naive_wom;
  r.writes = writes;
  r.alpha = alpha;
  r.ef = 1.0 / (double(writes) * (1.0 - bp));
  r.solution["beta"] = beta;
  r.solution["beta_prime"] = bp;
  return r;
}

bool naive_beats_baseline(double alpha, double rate) {
  const double ap = alpha_prime(alpha);
  const double bp = alpha_prime(alpha / rate);
  return 1.0 - ap <= 2.0 * (1.0 - bp);
}

double cp_gamma2(double alpha, double gamma1) {
  require_open_unit(alpha, "cp_gamma2");
  if (!(gamma1 >= 0.0 && gamma1 <= 1.0)) {
    throw std::domain_error("cp_gamma2: gamma1 must lie in [0, 1]");
  }
  const double g1 = std::max(gamma1, kGamma1Floor);
  const double exponent = std::log((1.0 + g1) / (2.0 * g1)) + (g1 - 3.0) / (2.0 * alpha);
  const double arg = -std::exp(exponent - std::log(alpha));
  if (arg < -kInvE * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "cp_gamma2: no steady state for alpha=" << alpha << ", gamma1=" << gamma1;
    throw InfeasibleError(msg.str());
  }
  const double g2 = -alpha * num::lambert_w0(std::max(arg, -kInvE));
  // A second-write block holds at most (Z + Y1)/2 valid pages.
  if (g2 > (1.0 + g1) / 2.0 + 1e-9) {
    std::ostringstream msg;
    msg << "cp_gamma2: solution gamma2=" << g2 << " exceeds (1+gamma1)/2";
    throw InfeasibleError(msg.str());
  }
  return g2;
}

AnalyticResult ef_cp_given_gamma1(double alpha, double gamma1) {
  const double g2 = cp_gamma2(alpha, gamma1);
  AnalyticResult r;
  r.system = System::cp_wom;
  r.writes = 2;
  r.alpha = alpha;
  r.ef = 1.0 / (1.5 - gamma1 / 2.0 - g2);
  r.solution["gamma1"] = gamma1;
  r.solution["gamma2"] = g2;
  return r;
}

AnalyticResult ef_cp_optimal(double alpha) {
  require_open_unit(alpha, "ef_cp_optimal");
  auto objective = [alpha](double g1) { return ef_cp_given_gamma1(alpha, g1).ef; };
  const auto min = num::minimize_scalar(objective, {0.0, 1.0});
  if (!std::isfinite(min.value)) {
    std::ostringstream msg;
    msg << "ef_cp_optimal: no feasible gamma1 for alpha=" << alpha;
    throw InfeasibleError(msg.str());
  }
  AnalyticResult r = ef_cp_given_gamma1(alpha, min.point[0]);
  r.solution["gamma1_opt"] = min.point[0];
  return r;
}

namespace {

// Residual of the multiwrite steady-state relation as a function of the
// last-stage valid fraction gt, with thresholds g[0..t-2] fixed:
//   r(gt) = (2 - 2^{1-t} - sum(g)/2 - gt) - alpha * sum_j ln(...)
// r is increasing on (0, alpha) and decreasing beyond, so the principal
// root lives in (0, min(alpha, cap)] whenever r at that endpoint is >= 0.
struct MultiwriteRelation {
  double alpha;
  int t;
  double d0;         // 2 - 2^{1-t} - sum(g)/2
  double log_fixed;  // sum over j=1..t-1 of the stage logs, plus ln of the
                     // final numerator, minus nothing in gt
  double cap;        // (1 + 2^{t-2} g_{t-1}) / 2^{t-1}

  double residual(double gt) const {
    return d0 - gt - alpha * (log_fixed - std::log(gt));
  }
};

MultiwriteRelation build_relation(double alpha, int t, std::span<const double> thresholds) {
  MultiwriteRelation rel;
  rel.alpha = alpha;
  rel.t = t;
  double gsum = 0.0;
  double logs = 0.0;
  double prev = 0.0;  // gamma_0 = 0
  for (int j = 1; j <= t - 1; ++j) {
    const double gj = std::max(thresholds[j - 1], kGamma1Floor);
    gsum += thresholds[j - 1];
    const double numer = 1.0 + std::ldexp(prev, j - 2);   // 1 + 2^{j-2} g_{j-1}
    const double denom = std::ldexp(gj, j - 1);           // 2^{j-1} g_j
    if (denom > numer) {
      std::ostringstream msg;
      msg << "multiwrite: threshold gamma_" << j << " above the stage capacity";
      throw InfeasibleError(msg.str());
    }
    logs += std::log(numer / denom);
    prev = gj;
  }
  const double final_numer = 1.0 + std::ldexp(prev, t - 2);  // 1 + 2^{t-2} g_{t-1}
  rel.d0 = 2.0 - std::ldexp(1.0, 1 - t) - gsum / 2.0;
  rel.log_fixed = logs + std::log(final_numer) - double(t - 1) * std::log(2.0);
  rel.cap = final_numer / std::ldexp(1.0, t - 1);
  return rel;
}

// Bisection for the principal gamma_t root; throws InfeasibleError when no
// root exists below min(alpha, cap).  The residual is re-checked after the
// solve instead of trusting the monotonicity argument.
// Principal root of rel.residual on (0, min(alpha, cap)].  The residual rises
// from -inf at 0+ to its maximum at gamma = alpha and falls beyond, so the
// bracket below holds at most one sign change.
double solve_gamma_t(const MultiwriteRelation& rel) {
  double lo = 1e-12;
  double hi = std::min({rel.alpha, rel.cap, 1.0});
  if (rel.residual(hi) < 0.0) {
    throw InfeasibleError("multiwrite: no gamma_t root for these thresholds");
  }
  if (rel.residual(lo) >= 0.0) return lo;  // root below the floor; the limit is 0+
  for (int i = 0; i < 200 && hi - lo > 1e-16 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (rel.residual(mid) < 0.0) lo = mid; else hi = mid;
  }
  if (std::abs(rel.residual(hi)) > 1e-9) {
    throw ConvergenceError("multiwrite: gamma_t residual above 1e-9 after bisection");
  }
  return hi;
}

}  // namespace

AnalyticResult ef_cp_multiwrite(double alpha, int writes) {
  require_open_unit(alpha, "ef_cp_multiwrite");
  if (writes < 2) throw std::domain_error("ef_cp_multiwrite: need t >= 2");
  const int t = writes;

  auto objective = [alpha, t](std::span<const double> g) {
    const auto rel = build_relation(alpha, t, g);
    const double gt = solve_gamma_t(rel);
    return 1.0 / (rel.d0 - gt);
  };

  std::vector<num::BracketedInterval> box(static_cast<std::size_t>(t - 1), {0.0, 1.0});
  const auto min = num::minimize_box(objective, box);
  if (!std::isfinite(min.value)) {
    std::ostringstream msg;
    msg << "ef_cp_multiwrite: no feasible thresholds for alpha=" << alpha << ", t=" << t;
    throw InfeasibleError(msg.str());
  }

  const auto rel = build_relation(alpha, t, min.point);
  const double gt = solve_gamma_t(rel);
  AnalyticResult r;
  r.system = System::cp_wom;
  r.writes = t;
  r.alpha = alpha;
  r.ef = min.value;
  for (int j = 1; j <= t - 1; ++j) {
    r.solution["gamma" + std::to_string(j)] = min.point[j - 1];
  }
  r.solution["gamma" + std::to_string(t)] = gt;
  return r;
}

bool capacity_contains(double rate1, double rate2) {
  if (rate1 < 0.0 || rate2 < 0.0) throw std::domain_error("capacity_contains: rates must be >= 0");
  if (rate1 > 1.0) return false;
  const double p = num::inverse_binary_entropy(std::min(rate1, 1.0));
  return rate2 <= 1.0 - p + 1e-12;
}

std::optional<double> max_sum_rate(int writes, bool fixed_rate) {
  if (writes < 1) throw std::domain_error("max_sum_rate: need t >= 1");
  if (!fixed_rate) return std::log2(double(writes) + 1.0);
  if (writes == 2) return kFixedRateTwoWriteSumRate;
  return std::nullopt;
}

}  // namespace womlab::model
