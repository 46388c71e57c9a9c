#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"
#include "womlab/errors.hpp"
#include "womlab/sweep.hpp"

#include <sstream>
#include <string>
#include <vector>

using namespace womlab;
using namespace womlab::sweep;
using model::System;

static SweepSpec analytic_spec() {
  SweepSpec spec;
  spec.alpha_range = {0.1, 0.9, 0.1};
  spec.systems = {System::baseline, System::naive_wom, System::cp_wom};
  return spec;
}

TEST_CASE("alpha range walks inclusive endpoints") {
  const AlphaRange r{0.1, 0.5, 0.1};
  const auto v = r.values();
  REQUIRE(v.size() == 5);
  CHECK(v.front() == doctest::Approx(0.1));
  CHECK(v.back() == doctest::Approx(0.5));

  // A single point is a degenerate range.
  const AlphaRange one{0.3, 0.3, 0.01};
  CHECK(one.values().size() == 1);

  // Rounding must not drop the stop value.
  const AlphaRange awkward{0.05, 0.95, 0.05};
  const auto w = awkward.values();
  REQUIRE(w.size() == 19);
  CHECK(w.back() == doctest::Approx(0.95));

  CHECK_THROWS_AS((AlphaRange{0.0, 0.5, 0.1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((AlphaRange{0.5, 1.0, 0.1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((AlphaRange{0.5, 0.4, 0.1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((AlphaRange{0.1, 0.5, 0.0}.validate()), std::invalid_argument);
}

TEST_CASE("expand orders points by (alpha, system, t)") {
  SweepSpec spec = analytic_spec();
  spec.alpha_range = {0.2, 0.4, 0.1};
  spec.t_list = {3, 2, 2};  // unordered with a duplicate
  const auto pts = expand(spec);
  // Per alpha: baseline once, then naive t=2,3, then cp t=2,3.
  REQUIRE(pts.size() == 3 * 5);
  for (int a = 0; a < 3; ++a) {
    const auto* p = &pts[std::size_t(a) * 5];
    CHECK(p[0].system == System::baseline);
    CHECK(p[0].writes == 1);
    CHECK(p[1].system == System::naive_wom);
    CHECK(p[1].writes == 2);
    CHECK(p[2].system == System::naive_wom);
    CHECK(p[2].writes == 3);
    CHECK(p[3].system == System::cp_wom);
    CHECK(p[3].writes == 2);
    CHECK(p[4].system == System::cp_wom);
    CHECK(p[4].writes == 3);
    for (int i = 1; i < 5; ++i) CHECK(p[i].alpha == p[0].alpha);
  }
  CHECK(pts[0].alpha == doctest::Approx(0.2));
  CHECK(pts[5].alpha == doctest::Approx(0.3));
  CHECK(pts[10].alpha == doctest::Approx(0.4));
}

TEST_CASE("analytic rows carry the solution fields") {
  SweepSpec spec = analytic_spec();
  const auto rows = evaluate_serial(spec);
  REQUIRE(rows.size() == 9 * 3);

  for (const auto& row : rows) {
    if (!row.feasible) continue;
    REQUIRE(row.ef_analytic.has_value());
    CHECK(*row.ef_analytic > 0.0);
    CHECK(!row.ef_sim.has_value());  // not a simulating sweep
    CHECK(!row.rel_err.has_value());
    CHECK(!row.seed.has_value());
    switch (row.system) {
      case System::baseline:
        CHECK(row.alpha_prime.has_value());
        CHECK(!row.gamma1.has_value());
        break;
      case System::naive_wom:
        CHECK(row.beta_prime.has_value());
        CHECK(row.rate.has_value());
        break;
      case System::cp_wom:
        CHECK(row.gamma1.has_value());
        CHECK(row.gamma2.has_value());
        break;
    }
  }

  // Naive at alpha >= R has no steady state: present but infeasible.
  int infeasible_naive = 0;
  for (const auto& row : rows) {
    if (row.system == System::naive_wom && !row.feasible) {
      ++infeasible_naive;
      CHECK(row.alpha > 0.77);
      CHECK(!row.ef_analytic.has_value());
    }
  }
  CHECK(infeasible_naive == 2);  // alpha = 0.8, 0.9
}

TEST_CASE("fixed gamma1 is honored and recorded") {
  SweepSpec spec;
  spec.alpha_range = {0.5, 0.5, 0.1};
  spec.systems = {System::cp_wom};
  spec.gamma1 = 0.32;
  const auto rows = evaluate_serial(spec);
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].gamma1.has_value());
  CHECK(*rows[0].gamma1 == 0.32);
  CHECK(*rows[0].ef_analytic == doctest::Approx(0.89224767607770028).epsilon(1e-9));
  CHECK(*rows[0].gamma2 == doctest::Approx(0.21923496265523909).epsilon(1e-9));

  // Without the pin the optimizer does at least as well.
  SweepSpec opt = spec;
  opt.gamma1.reset();
  const auto best = evaluate_serial(opt);
  CHECK(*best[0].ef_analytic <= *rows[0].ef_analytic + 1e-9);
}

TEST_CASE("serial and parallel evaluation agree exactly") {
  SweepSpec spec = analytic_spec();
  spec.t_list = {2, 3};
  const auto s = evaluate_serial(spec);
  const auto p = evaluate_parallel(spec);
  CHECK(to_csv(s) == to_csv(p));  // byte-for-byte, ordering included
}

TEST_CASE("csv schema") {
  CHECK(std::string(kCsvHeader) ==
        "alpha,system,t,R,ef_analytic,ef_sim,rel_err,gamma1,gamma2,alpha_prime,"
        "beta_prime,feasible,seed");

  SweepSpec spec;
  spec.alpha_range = {0.9, 0.9, 0.1};
  spec.systems = {System::naive_wom};
  const auto rows = evaluate_serial(spec);
  const std::string csv = to_csv(rows);

  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == kCsvHeader);
  REQUIRE(std::getline(in, line));
  // Infeasible naive point: empty value fields, feasible=false, no seed.
  CHECK(line == "0.9,naive_wom,2,0.77,,,,,,,,false,");
  CHECK(!std::getline(in, line));  // exactly header + one row
}

TEST_CASE("json serialization parses back") {
  SweepSpec spec;
  spec.alpha_range = {0.3, 0.5, 0.2};
  spec.systems = {System::baseline, System::cp_wom};
  const auto rows = evaluate_serial(spec);
  const auto parsed = nlohmann::json::parse(to_json(rows));
  REQUIRE(parsed.is_array());
  REQUIRE(parsed.size() == rows.size());
  for (const auto& item : parsed) {
    CHECK(item.contains("alpha"));
    CHECK(item.contains("system"));
    CHECK(item.contains("t"));
    CHECK(item.contains("feasible"));
    CHECK(item.contains("ef_analytic"));
    if (item["system"] == "cp_wom") {
      CHECK(item.contains("gamma1"));
      CHECK(item.contains("gamma2"));
      CHECK(!item.contains("beta_prime"));  // absent fields stay absent
    }
  }
  CHECK(parsed[0]["system"] == "baseline");
  CHECK(parsed[0]["alpha"] == doctest::Approx(0.3));
}

TEST_CASE("simulating sweep fills measurement fields deterministically") {
  SweepSpec spec;
  spec.alpha_range = {0.4, 0.4, 0.1};
  spec.systems = {System::baseline, System::cp_wom};
  spec.simulate = true;
  spec.sim_defaults.params = model::SystemParams{64, 64L * 128, 0};  // U filled per point
  spec.sim_defaults.measured_writes = 60'000;
  spec.sim_defaults.warmup_writes = 60'000;
  spec.sim_defaults.seed = 7;

  const auto rows = evaluate_parallel(spec);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    REQUIRE(row.feasible);
    REQUIRE(row.ef_sim.has_value());
    REQUIRE(row.rel_err.has_value());
    REQUIRE(row.seed.has_value());
    CHECK(*row.rel_err == doctest::Approx((*row.ef_sim - *row.ef_analytic) / *row.ef_analytic)
                              .epsilon(1e-12));
    // Coarse geometry, so just demand the right ballpark.
    CHECK(std::abs(*row.rel_err) < 0.15);
  }
  CHECK(*rows[0].seed == 7);
  CHECK(*rows[1].seed == 8);  // per-point seed keyed by expansion index

  // Bitwise repeatability of the whole artifact.
  const auto again = evaluate_parallel(spec);
  CHECK(to_csv(rows) == to_csv(again));
}

TEST_CASE("simulate skips t>2 points as analytic-only") {
  SweepSpec spec;
  spec.alpha_range = {0.3, 0.3, 0.1};
  spec.systems = {System::cp_wom};
  spec.t_list = {2, 3};
  spec.simulate = true;
  spec.sim_defaults.params = model::SystemParams{64, 64L * 128, 0};
  spec.sim_defaults.measured_writes = 40'000;
  spec.sim_defaults.warmup_writes = 40'000;

  const auto rows = evaluate_serial(spec);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].writes == 2);
  CHECK(rows[0].ef_sim.has_value());
  CHECK(rows[1].writes == 3);
  CHECK(!rows[1].ef_sim.has_value());  // no t=3 simulator
  CHECK(rows[1].ef_analytic.has_value());
  CHECK(rows[1].feasible);
}

TEST_CASE("find_crossover reproduces the known thresholds") {
  const double x = find_crossover(System::naive_wom, System::baseline);
  CHECK(x == doctest::Approx(0.64441006390613476).epsilon(5e-6));
  // Symmetric argument order finds the same point.
  CHECK(find_crossover(System::baseline, System::naive_wom) == doctest::Approx(x).epsilon(1e-9));

  const double y = find_crossover(System::naive_wom, System::cp_wom);
  CHECK(y > 0.50);
  CHECK(y < 0.58);
  CHECK(y == doctest::Approx(0.54535525765712034).epsilon(2e-3));

  // cp dominates baseline everywhere: no crossing to find.
  CHECK_THROWS_AS(find_crossover(System::cp_wom, System::baseline), BracketError);
}

TEST_CASE("spec validation") {
  SweepSpec spec = analytic_spec();
  spec.validate();

  SweepSpec bad = spec;
  bad.t_list = {1};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = spec;
  bad.rate = 1.2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = spec;
  bad.gamma1 = -0.2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = spec;
  bad.alpha_range = {0.5, 0.4, 0.1};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
