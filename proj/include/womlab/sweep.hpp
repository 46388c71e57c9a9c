#ifndef WOMLAB_SWEEP_HPP
#define WOMLAB_SWEEP_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "womlab/analytic_models.hpp"
#include "womlab/ftl_sim.hpp"

namespace womlab::sweep {

// Closed range start..stop walked in fixed steps (stop included up to half
// a step of rounding slack).
struct AlphaRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.01;

  void validate() const;  // 0 < start <= stop < 1, step > 0
  std::vector<double> values() const;
};

struct SweepSpec {
  AlphaRange alpha_range;
  std::vector<model::System> systems;
  std::vector<int> t_list = {2};
  std::optional<double> rate;    // naive per-write rate; default 0.77
  std::optional<double> gamma1;  // cp threshold; absent = optimize per point
  bool simulate = false;
  // Template for simulated points: geometry, write counts, base seed.  The
  // per-point logical size and system are filled in from the point.
  sim::SimConfig sim_defaults;

  double naive_rate() const { return rate.value_or(model::kNaiveDefaultRate); }
  void validate() const;
};

struct SweepPoint {
  double alpha = 0.0;
  model::System system = model::System::baseline;
  int writes = 1;
};

// One output row.  Absent optionals serialize as empty CSV fields; a point
// outside a system's domain is emitted with feasible=false, never dropped.
struct SweepRow {
  double alpha = 0.0;
  model::System system = model::System::baseline;
  int writes = 1;
  std::optional<double> rate;
  std::optional<double> ef_analytic;
  std::optional<double> ef_sim;
  std::optional<double> rel_err;  // signed (ef_sim - ef_analytic)/ef_analytic
  std::optional<double> gamma1;
  std::optional<double> gamma2;  // valid fraction at erase (gamma_t for t>2)
  std::optional<double> alpha_prime;
  std::optional<double> beta_prime;
  bool feasible = true;
  std::optional<std::uint64_t> seed;
};

// Points in canonical (alpha, system, t) order; baseline appears once per
// alpha with t=1.
std::vector<SweepPoint> expand(const SweepSpec& spec);

// `index` keys the per-point simulation seed (sim_defaults.seed + index) so
// results do not depend on evaluation order.
SweepRow evaluate_point(const SweepSpec& spec, const SweepPoint& point, std::size_t index);

std::vector<SweepRow> evaluate_serial(const SweepSpec& spec);
// Same rows as evaluate_serial; points are distributed across OpenMP
// threads and written by index, so ordering and content are identical.
std::vector<SweepRow> evaluate_parallel(const SweepSpec& spec);

extern const char* const kCsvHeader;
std::string to_csv(const std::vector<SweepRow>& rows);
std::string to_json(const std::vector<SweepRow>& rows, int indent = 2);

// Alpha where the two systems' analytic EF curves meet, located by a grid
// scan for a sign change and polished by root solving.  `rate` applies to
// any naive participant; cp uses its optimized-threshold curve.  Throws
// BracketError when the difference never changes sign on [lo, hi].
double find_crossover(model::System a, model::System b, double rate = model::kNaiveDefaultRate,
                      double lo = 0.02, double hi = 0.98);

}  // namespace womlab::sweep

#endif
