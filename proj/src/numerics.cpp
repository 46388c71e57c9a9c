#include "womlab/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "womlab/errors.hpp"

namespace womlab::num {

namespace {

constexpr double kInvE = 0.36787944117144233;  // 1/e
constexpr double kInf = std::numeric_limits<double>::infinity();

// Series about the branch point x = -1/e in p = sqrt(2(1 + e*x)):
// W0 = -1 + p - p^2/3 + 11p^3/72 - 43p^4/540 + 769p^5/17280.
// For p <= ~2.4e-3 (x within 1e-6 of -1/e) the truncation error is below
// 1e-16, and the residual w*e^w - x is quadratically smaller still.
double branch_point_series(double p) {
  return -1.0 +
         p * (1.0 +
              p * (-1.0 / 3.0 +
                   p * (11.0 / 72.0 +
                        p * (-43.0 / 540.0 + p * (769.0 / 17280.0)))));
}

double initial_guess(double x) {
  if (x < -0.32) {
    const double p = std::sqrt(2.0 * (1.0 + std::exp(1.0) * x));
    return branch_point_series(p);
  }
  if (x < 0.3) {
    // Taylor series at 0 (radius of convergence 1/e), good enough as a seed.
    return x * (1.0 + x * (-1.0 + x * (1.5 - 8.0 / 3.0 * x)));
  }
  if (x < 4.0) {
    // Log-based seed, within a few percent across the whole middle range.
    const double l = std::log1p(x);
    return l * (1.0 - std::log1p(l) / (2.0 + l));
  }
  const double l = std::log(x);
  const double ll = std::log(l);
  return l - ll + ll / l;
}

}  // namespace

double lambert_w0(double x, const SolverConfig& cfg) {
  if (!std::isfinite(x)) throw std::domain_error("lambert_w0: non-finite argument");
  if (x < -kInvE) {
    if (x < -kInvE - cfg.abs_tol) {
      std::ostringstream msg;
      msg << "lambert_w0: argument " << x << " below branch point -1/e";
      throw std::domain_error(msg.str());
    }
    x = -kInvE;  // within tolerance of the branch point
  }
  if (x == 0.0) return 0.0;

  // Within 1e-6 of the branch point Halley's correction degenerates
  // (the 1+w factor vanishes); the series is exact to working precision.
  if (x <= -kInvE + 1e-6) {
    const double p = std::sqrt(std::max(0.0, 2.0 * (1.0 + std::exp(1.0) * x)));
    return std::max(-1.0, branch_point_series(p));
  }

  double w = initial_guess(x);
  const double tol = cfg.abs_tol * std::max(1.0, std::abs(x));
  for (int i = 0; i < cfg.max_iter; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double fp = ew * (1.0 + w);
    const double fpp = ew * (2.0 + w);
    const double denom = fp - 0.5 * f * fpp / fp;
    double step = f / denom;
    // Keep the iterate on the principal branch.
    if (w - step < -1.0) step = (w + 1.0) / 2.0;
    const bool met = std::abs(f) <= tol;
    w -= step;
    // Cubic convergence: one step past the tolerance lands at machine
    // precision, so callers see a fully polished root.
    if (met) return w;
  }
  const double resid = std::abs(w * std::exp(w) - x);
  if (resid <= tol) return w;
  std::ostringstream msg;
  msg << "lambert_w0: no convergence for x=" << x << " (residual " << resid << ")";
  throw ConvergenceError(msg.str());
}

double solve_scalar(const std::function<double(double)>& f, double target,
                    BracketedInterval interval, const SolverConfig& cfg) {
  double lo = interval.lo, hi = interval.hi;
  if (!(lo < hi)) throw std::invalid_argument("solve_scalar: lo must be < hi");
  double flo = f(lo) - target;
  double fhi = f(hi) - target;
  if (std::abs(flo) <= cfg.abs_tol) return lo;
  if (std::abs(fhi) <= cfg.abs_tol) return hi;
  if ((flo > 0) == (fhi > 0)) {
    std::ostringstream msg;
    msg << "solve_scalar: no sign change over [" << lo << ", " << hi << "]";
    throw BracketError(msg.str());
  }

  double x = lo, fx = flo;
  for (int i = 0; i < cfg.max_iter; ++i) {
    // Secant candidate, accepted only while it stays safely interior;
    // otherwise fall back to the midpoint.
    double mid = 0.5 * (lo + hi);
    double xs = hi - fhi * (hi - lo) / (fhi - flo);
    x = (xs > lo + 0.25 * (hi - lo) && xs < hi - 0.25 * (hi - lo)) ? xs : mid;
    fx = f(x) - target;
    if (std::abs(fx) <= cfg.abs_tol) return x;
    if ((fx > 0) == (flo > 0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
    if (hi - lo <= std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(lo))) {
      break;
    }
  }
  // The bracket has collapsed to machine precision; accept the best endpoint
  // if it meets the tolerance, else report failure.
  if (std::abs(fx) <= cfg.abs_tol) return x;
  if (std::abs(flo) < std::abs(fhi) && std::abs(flo) <= cfg.abs_tol) return lo;
  if (std::abs(fhi) <= cfg.abs_tol) return hi;
  std::ostringstream msg;
  msg << "solve_scalar: residual " << std::abs(fx) << " above tolerance " << cfg.abs_tol;
  throw ConvergenceError(msg.str());
}

namespace {

// Evaluation wrapper: infeasible / undefined points become +infinity.
double eval_or_inf(const std::function<double(std::span<const double>)>& f,
                   std::span<const double> x) {
  try {
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  } catch (const std::domain_error&) {
    return kInf;
  }
}

struct Best {
  std::vector<double> point;
  double value = kInf;
  void offer(std::span<const double> x, double v) {
    if (v < value) {
      value = v;
      point.assign(x.begin(), x.end());
    }
  }
};

// Golden-section over [a, b] along one coordinate, tracking the best point.
void golden_refine(const std::function<double(std::span<const double>)>& f,
                   std::vector<double>& x, std::size_t axis, double a, double b,
                   double tol, int max_iter, Best& best) {
  static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  auto at = [&](double t) {
    x[axis] = t;
    const double v = eval_or_inf(f, x);
    best.offer(x, v);
    return v;
  };
  double fc = at(c);
  double fd = at(d);
  for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = at(d);
    }
  }
  x[axis] = 0.5 * (a + b);
  best.offer(x, eval_or_inf(f, x));
}

}  // namespace

MinimizeResult minimize_box(const std::function<double(std::span<const double>)>& f,
                            std::span<const BracketedInterval> box,
                            const SolverConfig& cfg) {
  const std::size_t dim = box.size();
  if (dim == 0) throw std::invalid_argument("minimize_box: empty box");
  for (const auto& iv : box) {
    if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      throw std::invalid_argument("minimize_box: invalid interval");
    }
  }

  // Grid resolution: pitch 1e-3 in 1-D, otherwise as fine as a fixed
  // evaluation budget allows (never coarser than pitch ~0.2 per axis).
  std::size_t per_axis;
  if (dim == 1) {
    per_axis = 1001;
  } else {
    const double budget = 2e5;
    per_axis = static_cast<std::size_t>(std::pow(budget, 1.0 / double(dim)));
    per_axis = std::clamp<std::size_t>(per_axis, 6, 501);
  }

  std::size_t total = 1;
  for (std::size_t a = 0; a < dim; ++a) total *= per_axis;

  // Data-parallel scan: every grid point is independent.  Values land in a
  // plain array and the argmin reduction below is serial, so the result is
  // identical with and without threads.
  std::vector<double> values(total);
  std::vector<double> step(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    step[a] = (box[a].hi - box[a].lo) / double(per_axis - 1);
  }
#pragma omp parallel for schedule(static)
  for (long long idx = 0; idx < static_cast<long long>(total); ++idx) {
    std::vector<double> x(dim);
    std::size_t rem = static_cast<std::size_t>(idx);
    for (std::size_t a = 0; a < dim; ++a) {
      x[a] = box[a].lo + double(rem % per_axis) * step[a];
      rem /= per_axis;
    }
    values[static_cast<std::size_t>(idx)] = eval_or_inf(f, x);
  }

  Best best;
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < total; ++i) {
    if (values[i] < best.value) {
      best.value = values[i];
      best_idx = i;
    }
  }
  {
    std::vector<double> x(dim);
    std::size_t rem = best_idx;
    for (std::size_t a = 0; a < dim; ++a) {
      x[a] = box[a].lo + double(rem % per_axis) * step[a];
      rem /= per_axis;
    }
    best.point = x;
  }
  if (!std::isfinite(best.value)) {
    // Nothing feasible anywhere on the grid: report +inf at the box centre.
    std::vector<double> centre(dim);
    for (std::size_t a = 0; a < dim; ++a) centre[a] = 0.5 * (box[a].lo + box[a].hi);
    return {centre, kInf};
  }

  // Local refinement.  1-D: golden-section over the two cells flanking the
  // best sample.  Multi-D: coordinate descent sweeps, one golden-section
  // line search per axis, restricted to +-1 grid cell and growing outward
  // on later sweeps.
  std::vector<double> x = best.point;
  const int sweeps = (dim == 1) ? 1 : 8;
  for (int s = 0; s < sweeps; ++s) {
    const double prev = best.value;
    for (std::size_t a = 0; a < dim; ++a) {
      x = best.point;
      const double halfspan = step[a] * double(s + 1);
      const double lo = std::max(box[a].lo, x[a] - halfspan);
      const double hi = std::min(box[a].hi, x[a] + halfspan);
      golden_refine(f, x, a, lo, hi, cfg.abs_tol, cfg.max_iter, best);
    }
    if (dim > 1 && prev - best.value <= cfg.abs_tol * std::max(1.0, std::abs(prev))) break;
  }
  return {best.point, best.value};
}

MinimizeResult minimize_scalar(const std::function<double(double)>& f,
                               BracketedInterval interval, const SolverConfig& cfg) {
  auto wrapped = [&f](std::span<const double> x) { return f(x[0]); };
  std::array<BracketedInterval, 1> box{interval};
  return minimize_box(wrapped, box, cfg);
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("binary_entropy: p must lie in [0, 1]");
  }
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double inverse_binary_entropy(double h) {
  if (!(h >= 0.0 && h <= 1.0)) {
    throw std::domain_error("inverse_binary_entropy: h must lie in [0, 1]");
  }
  if (h == 0.0) return 0.0;
  if (h == 1.0) return 0.5;
  double lo = 0.0, hi = 0.5;
  // Bisect on p rather than stopping at an h-residual: the curve is flat
  // near p = 0.5 and an h-based stop would leave p off by ~sqrt(tol).
  for (int i = 0; i < 100 && hi - lo > 1e-17; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (binary_entropy(mid) < h) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace womlab::num
