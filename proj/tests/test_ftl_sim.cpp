#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "womlab/analytic_models.hpp"
#include "womlab/errors.hpp"
#include "womlab/ftl_sim.hpp"

#include <cmath>
#include <stdexcept>

using namespace womlab;
using namespace womlab::model;
using namespace womlab::sim;

// Small-but-honest geometry for statistical checks: full-size blocks keep
// the finite-Z bias low while 512 of them keep runs around a second.
static SimConfig mid_cfg(System sys, double alpha, long long measured) {
  SimConfig cfg;
  cfg.system = sys;
  cfg.params = SystemParams{256, 256L * 512, std::lround(alpha * 256 * 512)};
  cfg.measured_writes = measured;
  cfg.seed = 99;
  return cfg;
}

TEST_CASE("config validation") {
  SimConfig cfg;
  cfg.validate();  // defaults are fine

  SimConfig bad = cfg;
  bad.params.logical_pages = bad.params.physical_pages;  // U == T
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.params.physical_pages = 1000;  // not a multiple of Z
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.measured_writes = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.warmup_writes = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.system = System::naive_wom;
  bad.rate = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  // naive: U has to fit into round(R*Z) slots per block.
  bad = cfg;
  bad.system = System::naive_wom;
  bad.rate = 0.77;
  bad.params.logical_pages = 450000;  // > 2048 * 197
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.system = System::cp_wom;
  bad.gamma1 = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  // Wrappers enforce the system tag.
  SimConfig naive = mid_cfg(System::naive_wom, 0.3, 1000);
  CHECK_THROWS_AS(run_baseline(naive), std::invalid_argument);
  SimConfig base = mid_cfg(System::baseline, 0.3, 1000);
  CHECK_THROWS_AS(run_cp_wom(base), std::invalid_argument);
}

TEST_CASE("step_write basics on a toy device") {
  SimConfig cfg;
  cfg.system = System::baseline;
  cfg.params = SystemParams{4, 16, 6};  // Z=4, 4 blocks, U=6
  cfg.check_invariants = true;
  FtlSimulator sim(cfg);

  CHECK(sim.slots_per_block() == 4);
  CHECK(sim.block_count() == 4);

  // Fresh id: open block gains a valid page, P and L tick together.
  sim.step_write(0);
  CHECK(sim.counters().logical == 1);
  CHECK(sim.counters().physical == 1);
  CHECK(sim.total_valid() == 1);
  CHECK(sim.open_block() == 0);
  CHECK(sim.block(0).valid_count == 1);
  CHECK(sim.block(0).slots[0] == SlotStatus::valid);
  CHECK(sim.location(0).block == 0);
  CHECK(sim.location(0).slot == 0);

  // Overwrite of the same id in the open block: conservation.
  sim.step_write(0);
  CHECK(sim.counters().logical == 2);
  CHECK(sim.counters().physical == 2);
  CHECK(sim.total_valid() == 1);
  CHECK(sim.block(0).slots[0] == SlotStatus::invalid);
  CHECK(sim.block(0).slots[1] == SlotStatus::valid);
  CHECK(sim.block(0).valid_count == 1);
  CHECK(sim.counters().erases == 0);
}

TEST_CASE("sequential fill needs no GC while a clean block remains") {
  SimConfig cfg;
  cfg.system = System::baseline;
  cfg.params = SystemParams{4, 16, 12};  // U = T - Z exactly
  cfg.check_invariants = true;
  FtlSimulator sim(cfg);
  for (int id = 0; id < 12; ++id) sim.step_write(id);
  CHECK(sim.counters().erases == 0);
  CHECK(sim.total_valid() == 12);
  CHECK(sim.counters().logical == 12);
  CHECK(sim.counters().physical == 12);
  // Three blocks completely valid, the last one untouched.
  CHECK(sim.block(0).valid_count == 4);
  CHECK(sim.block(1).valid_count == 4);
  CHECK(sim.block(2).valid_count == 4);
  CHECK(sim.block(3).valid_count == 0);

  // The next overwrite still fits (one clean block left), the device keeps
  // going past it via GC without deadlock.
  for (int id = 0; id < 24; ++id) sim.step_write(id % 12);
  CHECK(sim.total_valid() == 12);
  CHECK(sim.counters().erases > 0);
}

TEST_CASE("cp stage-2 pages occupy two slots") {
  SimConfig cfg;
  cfg.system = System::cp_wom;
  cfg.gamma1 = 0.5;
  cfg.params = SystemParams{8, 8 * 6, 20};
  cfg.check_invariants = true;
  FtlSimulator sim(cfg);
  for (int id = 0; id < 20; ++id) sim.step_write(id);
  // Churn until some page lands on a stage-2 block.
  bool saw_stage2 = false;
  long long physical_before = 0;
  for (int step = 0; step < 4000 && !saw_stage2; ++step) {
    const int id = (step * 7) % 20;
    physical_before = sim.counters().physical;
    sim.step_write(id);
    const PageLoc& loc = sim.location(id);
    if (loc.slot2 >= 0) {
      saw_stage2 = true;
      CHECK(sim.block(loc.block).stage == 2);
      CHECK(loc.slot != loc.slot2);
      CHECK(sim.block(loc.block).slots[std::size_t(loc.slot)] == SlotStatus::valid);
      CHECK(sim.block(loc.block).slots[std::size_t(loc.slot2)] == SlotStatus::valid);
      // Two physical page writes for one logical request.
      CHECK(sim.counters().physical == physical_before + 2);
    }
  }
  CHECK(saw_stage2);
  CHECK(sim.total_valid() == 20);
}

TEST_CASE("naive blocks expose round(R*Z) slots") {
  SimConfig cfg;
  cfg.system = System::naive_wom;
  cfg.rate = 0.77;
  cfg.params = SystemParams{256, 256L * 512, 40000};
  FtlSimulator sim(cfg);
  CHECK(sim.slots_per_block() == 197);
}

TEST_CASE("baseline report: EF equals WA and matches the oracle at alpha=0.5") {
  SimConfig cfg = mid_cfg(System::baseline, 0.5, 2'000'000);
  cfg.collect_histogram = true;
  cfg.check_invariants = true;
  const SimReport rep = run_baseline(cfg);

  CHECK(rep.counters.logical == 2'000'000);
  // EF and WA may differ only by the open block's fill level at the
  // measurement boundaries: |E*Z - P| < Z.
  CHECK(std::abs(rep.ef - rep.wa) <= 256.0 / 2'000'000);
  CHECK(rep.ef == doctest::Approx(1.2550009749159752).epsilon(0.03));
  CHECK(!rep.gamma2_measured.has_value());

  REQUIRE(rep.histogram.has_value());
  const ValidityHistogram& h = *rep.histogram;
  CHECK(h.total() == doctest::Approx(512.0).epsilon(1e-9));  // partition of blocks
  CHECK(h.samples > 1000);

  // Steady-state structure: nearly no block ends below 0.9*Y valid pages.
  const double y = 0.20318786997997995 * 256.0;
  double below = 0.0, stage1 = 0.0;
  for (int i = 0; i < int(h.counts[0].size()); ++i) {
    stage1 += h.counts[0][std::size_t(i)];
    if (double(i) < 0.9 * y) below += h.counts[0][std::size_t(i)];
  }
  CHECK(below < 0.01 * 512.0);
  CHECK(stage1 + h.free_blocks == doctest::Approx(512.0).epsilon(1e-9));

  // Soft plateau diagnostic is reported for the baseline.
  REQUIRE(rep.plateau_rsd.has_value());
  CHECK(*rep.plateau_rsd >= 0.0);
  CHECK(*rep.plateau_rsd < 1.0);
  MESSAGE("baseline plateau rsd = ", *rep.plateau_rsd);
}

TEST_CASE("baseline at alpha=0.05 wears one erase per block of writes") {
  SimConfig cfg = mid_cfg(System::baseline, 0.05, 1'000'000);
  const SimReport rep = run_baseline(cfg);
  CHECK(rep.ef >= 1.0 - 256.0 / 1'000'000);
  CHECK(rep.ef <= 1.03);
}

TEST_CASE("naive report matches the oracle") {
  SimConfig cfg = mid_cfg(System::naive_wom, 0.5, 2'000'000);
  cfg.check_invariants = true;
  const SimReport rep = run_naive(cfg);
  CHECK(rep.ef == doctest::Approx(0.82260064804282551).epsilon(0.05));
  // Two write stages per erase cycle: WA = (2 - b')/(2(1 - b')) while
  // EF = 1/(2(1 - b')), so the gap is exactly one half in steady state.
  CHECK(rep.wa - rep.ef == doctest::Approx(0.5).epsilon(0.02));

  SimConfig low = mid_cfg(System::naive_wom, 0.05, 1'000'000);
  CHECK(run_naive(low).ef == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("naive meets the baseline near the analytic crossover") {
  SimConfig cfg = mid_cfg(System::naive_wom, 0.6442, 2'000'000);
  const SimReport rep = run_naive(cfg);
  const double base = ef_baseline(0.6442).ef;
  CHECK(std::abs(rep.ef - base) / base <= 0.05);
}

TEST_CASE("cp report: EF and measured gamma2 track the analytic system") {
  SimConfig cfg = mid_cfg(System::cp_wom, 0.5, 2'000'000);
  cfg.gamma1 = 0.32;
  cfg.collect_histogram = true;
  cfg.check_invariants = true;
  const SimReport rep = run_cp_wom(cfg);

  CHECK(rep.ef == doctest::Approx(0.89224767607770028).epsilon(0.05));
  REQUIRE(rep.gamma2_measured.has_value());
  CHECK(*rep.gamma2_measured == doctest::Approx(0.21923496265523909).epsilon(0.05));
  CHECK(!rep.plateau_rsd.has_value());

  // Both stages show up in the histogram, and it still partitions blocks.
  REQUIRE(rep.histogram.has_value());
  const ValidityHistogram& h = *rep.histogram;
  CHECK(h.total() == doctest::Approx(512.0).epsilon(1e-9));
  double stage2 = 0.0;
  for (double c : h.counts[1]) stage2 += c;
  CHECK(stage2 > 0.0);

  SimConfig low = mid_cfg(System::cp_wom, 0.05, 1'000'000);
  low.gamma1 = 0.01;
  CHECK(run_cp_wom(low).ef == doctest::Approx(2.0 / 3.0).epsilon(0.05));
}

TEST_CASE("reports are bit-identical for identical configs") {
  SimConfig cfg;
  cfg.system = System::cp_wom;
  cfg.gamma1 = 0.3;
  cfg.params = SystemParams{64, 64L * 256, 8192};
  cfg.measured_writes = 200'000;
  cfg.warmup_writes = 200'000;
  cfg.seed = 12345;
  cfg.collect_histogram = true;

  const SimReport a = run_cp_wom(cfg);
  const SimReport b = run_cp_wom(cfg);
  CHECK(a.counters.logical == b.counters.logical);
  CHECK(a.counters.physical == b.counters.physical);
  CHECK(a.counters.erases == b.counters.erases);
  CHECK(a.ef == b.ef);  // exact, not approximate
  CHECK(a.wa == b.wa);
  REQUIRE(a.gamma2_measured.has_value());
  REQUIRE(b.gamma2_measured.has_value());
  CHECK(*a.gamma2_measured == *b.gamma2_measured);
  REQUIRE(a.histogram.has_value());
  REQUIRE(b.histogram.has_value());
  CHECK(a.histogram->counts[0] == b.histogram->counts[0]);
  CHECK(a.histogram->counts[1] == b.histogram->counts[1]);
  CHECK(a.histogram->free_blocks == b.histogram->free_blocks);
  CHECK(a.histogram->samples == b.histogram->samples);

  // A different seed must not reproduce the same trajectory.
  SimConfig other = cfg;
  other.seed = 54321;
  const SimReport c = run_cp_wom(other);
  CHECK(c.counters.physical != a.counters.physical);
}

TEST_CASE("json serialization carries the report") {
  SimConfig cfg;
  cfg.system = System::baseline;
  cfg.params = SystemParams{64, 64L * 128, 4096};
  cfg.measured_writes = 50'000;
  cfg.warmup_writes = 50'000;
  cfg.collect_histogram = true;
  const SimReport rep = run_baseline(cfg);
  const std::string js = rep.to_json(2);
  CHECK(js.find("\"ef\"") != std::string::npos);
  CHECK(js.find("\"wa\"") != std::string::npos);
  CHECK(js.find("\"erases\"") != std::string::npos);
  CHECK(js.find("\"seed\"") != std::string::npos);
  CHECK(js.find("\"histogram\"") != std::string::npos);
  CHECK(js.find("\"wall_time_seconds\"") != std::string::npos);
  CHECK(js.find("\"gamma2_measured\"") == std::string::npos);  // baseline report
}

TEST_CASE("run is one-shot") {
  SimConfig cfg;
  cfg.params = SystemParams{64, 64L * 128, 4096};
  cfg.measured_writes = 10'000;
  cfg.warmup_writes = 10'000;
  FtlSimulator sim(cfg);
  (void)sim.run();
  CHECK_THROWS_AS(sim.run(), std::logic_error);
}

TEST_CASE("lifetime counter law") {
  SimConfig cfg;
  cfg.system = System::naive_wom;
  cfg.params = SystemParams{64, 64L * 256, 6000};
  cfg.measured_writes = 150'000;
  cfg.warmup_writes = 150'000;
  cfg.check_invariants = true;
  FtlSimulator sim(cfg);
  (void)sim.run();
  const Counters& life = sim.lifetime_counters();
  // Every written slot came from an erase or from the initially clean pool,
  // and in a two-stage system each slot absorbs at most two writes per cycle.
  CHECK(life.physical <= 2 * (life.erases + sim.block_count()) * sim.slots_per_block());
  CHECK(life.physical >= life.logical);
  CHECK(life.logical >= 300'000 + 6000);
}
