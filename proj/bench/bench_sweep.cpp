// Times the sweep evaluator in serial and OpenMP form on an
// optimizer-heavy analytic grid and reports the speedup.  The two paths
// must agree row for row; this also guards the determinism contract.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "womlab/sweep.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool rows_equal(const std::vector<womlab::sweep::SweepRow>& a,
                const std::vector<womlab::sweep::SweepRow>& b) {
  return womlab::sweep::to_csv(a) == womlab::sweep::to_csv(b);
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 1;

  // The t=3 rows each carry a two-dimensional threshold optimization
  // (~1.3 s apiece), which is what makes this grid optimizer-heavy; the
  // alpha step keeps one full pass in the tens of seconds.
  womlab::sweep::SweepSpec spec;
  spec.alpha_range = {0.05, 0.95, 0.1};
  spec.systems = {womlab::model::System::baseline, womlab::model::System::naive_wom,
                  womlab::model::System::cp_wom};
  spec.t_list = {2, 3};

  const auto points = womlab::sweep::expand(spec);
  std::printf("sweep points: %zu (cp rows carry a threshold optimization each)\n", points.size());
#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: not enabled\n");
#endif

  double best_serial = 1e100;
  double best_parallel = 1e100;
  std::vector<womlab::sweep::SweepRow> serial_rows;
  std::vector<womlab::sweep::SweepRow> parallel_rows;
  for (int r = 0; r < reps; ++r) {
    auto t0 = Clock::now();
    serial_rows = womlab::sweep::evaluate_serial(spec);
    best_serial = std::min(best_serial, seconds_since(t0));

    t0 = Clock::now();
    parallel_rows = womlab::sweep::evaluate_parallel(spec);
    best_parallel = std::min(best_parallel, seconds_since(t0));
  }

  if (!rows_equal(serial_rows, parallel_rows)) {
    std::printf("FAIL: serial and parallel sweeps disagree\n");
    return 1;
  }

  std::printf("serial:   %8.3f s (best of %d)\n", best_serial, reps);
  std::printf("parallel: %8.3f s (best of %d)\n", best_parallel, reps);
  std::printf("speedup:  %.2fx\n", best_serial / best_parallel);
  return 0;
}
