#include "womlab/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "womlab/errors.hpp"

namespace womlab::sweep {

void AlphaRange::validate() const {
  if (!(start > 0.0 && start <= stop && stop < 1.0)) {
    throw std::invalid_argument("AlphaRange: need 0 < start <= stop < 1");
  }
  if (!(step > 0.0)) throw std::invalid_argument("AlphaRange: step must be > 0");
}

std::vector<double> AlphaRange::values() const {
  validate();
  std::vector<double> out;
  const long n = std::lround(std::floor((stop - start) / step + 0.5));
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) {
    const double a = start + double(k) * step;
    if (a >= 1.0) break;
    out.push_back(a);
  }
  return out;
}

void SweepSpec::validate() const {
  alpha_range.validate();
  if (systems.empty()) throw std::invalid_argument("SweepSpec: no systems selected");
  if (t_list.empty()) throw std::invalid_argument("SweepSpec: empty t list");
  for (int t : t_list) {
    if (t < 2) throw std::invalid_argument("SweepSpec: t must be >= 2");
  }
  if (rate && !(*rate > 0.0 && *rate <= 1.0)) {
    throw std::invalid_argument("SweepSpec: rate must lie in (0, 1]");
  }
  if (gamma1 && !(*gamma1 >= 0.0 && *gamma1 <= 1.0)) {
    throw std::invalid_argument("SweepSpec: gamma1 must lie in [0, 1]");
  }
}

std::vector<SweepPoint> expand(const SweepSpec& spec) {
  spec.validate();
  std::vector<model::System> systems = spec.systems;
  std::sort(systems.begin(), systems.end());
  systems.erase(std::unique(systems.begin(), systems.end()), systems.end());
  std::vector<int> ts = spec.t_list;
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  std::vector<SweepPoint> points;
  for (double a : spec.alpha_range.values()) {
    for (model::System s : systems) {
      if (s == model::System::baseline) {
        points.push_back({a, s, 1});
        continue;
      }
      for (int t : ts) points.push_back({a, s, t});
    }
  }
  return points;
}

namespace {

sim::SimConfig sim_config_for(const SweepSpec& spec, const SweepPoint& point, std::size_t index,
                              double gamma1) {
  sim::SimConfig cfg = spec.sim_defaults;
  cfg.system = point.system;
  cfg.params.logical_pages = std::lround(point.alpha * double(cfg.params.physical_pages));
  cfg.rate = spec.naive_rate();
  cfg.gamma1 = gamma1;
  cfg.seed = spec.sim_defaults.seed + index;
  return cfg;
}

}  // namespace

SweepRow evaluate_point(const SweepSpec& spec, const SweepPoint& point, std::size_t index) {
  SweepRow row;
  row.alpha = point.alpha;
  row.system = point.system;
  row.writes = point.writes;

  double sim_gamma1 = 0.0;
  try {
    switch (point.system) {
      case model::System::baseline: {
        const auto r = model::ef_baseline(point.alpha);
        row.ef_analytic = r.ef;
        row.alpha_prime = r.solution.at("alpha_prime");
        break;
      }
      case model::System::naive_wom: {
        row.rate = spec.naive_rate();
        const auto r = model::ef_naive(point.alpha, *row.rate, point.writes);
        row.ef_analytic = r.ef;
        row.beta_prime = r.solution.at("beta_prime");
        break;
      }
      case model::System::cp_wom: {
        model::AnalyticResult r;
        if (spec.gamma1) {
          if (point.writes != 2) {
            throw std::invalid_argument("fixed gamma1 only applies to t=2 cp sweeps");
          }
          r = model::ef_cp_given_gamma1(point.alpha, *spec.gamma1);
        } else if (point.writes == 2) {
          r = model::ef_cp_optimal(point.alpha);
        } else {
          r = model::ef_cp_multiwrite(point.alpha, point.writes);
        }
        row.ef_analytic = r.ef;
        row.gamma1 = r.solution.at("gamma1");
        row.gamma2 = r.solution.at("gamma" + std::to_string(point.writes));
        sim_gamma1 = *row.gamma1;
        break;
      }
    }
  } catch (const std::domain_error&) {  // covers InfeasibleError
    row.feasible = false;
    return row;
  } catch (const std::invalid_argument&) {
    row.feasible = false;
    return row;
  }

  const bool simulable = point.writes == 2 || point.system == model::System::baseline;
  if (spec.simulate && simulable) {
    try {
      const sim::SimConfig cfg = sim_config_for(spec, point, index, sim_gamma1);
      const sim::SimReport rep = sim::run_simulation(cfg);
      row.ef_sim = rep.ef;
      row.seed = cfg.seed;
      if (row.ef_analytic && *row.ef_analytic != 0.0) {
        row.rel_err = (rep.ef - *row.ef_analytic) / *row.ef_analytic;
      }
    } catch (const std::invalid_argument&) {
      row.feasible = false;  // e.g. alpha too extreme for this geometry
    }
  }
  return row;
}

std::vector<SweepRow> evaluate_serial(const SweepSpec& spec) {
  const auto points = expand(spec);
  std::vector<SweepRow> rows(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    rows[i] = evaluate_point(spec, points[i], i);
  }
  return rows;
}

std::vector<SweepRow> evaluate_parallel(const SweepSpec& spec) {
  const auto points = expand(spec);
  std::vector<SweepRow> rows(points.size());
  std::vector<std::string> failures(points.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(points.size()); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    try {
      rows[ui] = evaluate_point(spec, points[ui], ui);
    } catch (const std::exception& e) {
      failures[ui] = e.what();
    }
  }
  for (const std::string& f : failures) {
    if (!f.empty()) throw std::runtime_error("sweep point failed: " + f);
  }
  return rows;
}

const char* const kCsvHeader =
    "alpha,system,t,R,ef_analytic,ef_sim,rel_err,gamma1,gamma2,alpha_prime,beta_prime,feasible,"
    "seed";

namespace {

void append_field(std::ostringstream& os, const std::optional<double>& v) {
  os << ',';
  if (v) os << std::setprecision(10) << *v;
}

}  // namespace

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    os << std::setprecision(10) << r.alpha << ',' << model::system_name(r.system) << ','
       << r.writes;
    append_field(os, r.rate);
    append_field(os, r.ef_analytic);
    append_field(os, r.ef_sim);
    append_field(os, r.rel_err);
    append_field(os, r.gamma1);
    append_field(os, r.gamma2);
    append_field(os, r.alpha_prime);
    append_field(os, r.beta_prime);
    os << ',' << (r.feasible ? "true" : "false") << ',';
    if (r.seed) os << *r.seed;
    os << '\n';
  }
  return os.str();
}

std::string to_json(const std::vector<SweepRow>& rows, int indent) {
  nlohmann::json arr = nlohmann::json::array();
  for (const SweepRow& r : rows) {
    nlohmann::json j;
    j["alpha"] = r.alpha;
    j["system"] = model::system_name(r.system);
    j["t"] = r.writes;
    if (r.rate) j["R"] = *r.rate;
    if (r.ef_analytic) j["ef_analytic"] = *r.ef_analytic;
    if (r.ef_sim) j["ef_sim"] = *r.ef_sim;
    if (r.rel_err) j["rel_err"] = *r.rel_err;
    if (r.gamma1) j["gamma1"] = *r.gamma1;
    if (r.gamma2) j["gamma2"] = *r.gamma2;
    if (r.alpha_prime) j["alpha_prime"] = *r.alpha_prime;
    if (r.beta_prime) j["beta_prime"] = *r.beta_prime;
    j["feasible"] = r.feasible;
    if (r.seed) j["seed"] = *r.seed;
    arr.push_back(std::move(j));
  }
  return indent < 0 ? arr.dump() : arr.dump(indent);
}

namespace {

double analytic_ef(model::System s, double alpha, double rate) {
  switch (s) {
    case model::System::baseline:
      return model::ef_baseline(alpha).ef;
    case model::System::naive_wom:
      return model::ef_naive(alpha, rate).ef;
    case model::System::cp_wom:
      return model::ef_cp_optimal(alpha).ef;
  }
  throw std::invalid_argument("analytic_ef: unknown system");
}

}  // namespace

double find_crossover(model::System a, model::System b, double rate, double lo, double hi) {
  if (a == b) throw std::invalid_argument("find_crossover: need two distinct systems");
  if (!(lo > 0.0 && lo < hi && hi < 1.0)) {
    throw std::invalid_argument("find_crossover: need 0 < lo < hi < 1");
  }
  auto diff = [&](double alpha) { return analytic_ef(a, alpha, rate) - analytic_ef(b, alpha, rate); };

  const double step = 0.005;
  double prev_alpha = 0.0;
  double prev_d = 0.0;
  bool have_prev = false;
  for (double alpha = lo; alpha <= hi + step / 2; alpha += step) {
    const double x = std::min(alpha, hi);
    double d;
    try {
      d = diff(x);
    } catch (const std::domain_error&) {
      have_prev = false;  // outside one system's domain; restart the scan
      continue;
    }
    if (d == 0.0) return x;
    if (have_prev && (d < 0.0) != (prev_d < 0.0)) {
      const auto root = num::solve_scalar(diff, 0.0, {prev_alpha, x});
      return root;
    }
    prev_alpha = x;
    prev_d = d;
    have_prev = true;
  }
  throw BracketError("find_crossover: erasure factors do not cross on the interval");
}

}  // namespace womlab::sweep
