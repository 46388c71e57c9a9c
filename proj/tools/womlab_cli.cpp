// womlab: analytic erasure-factor tables, FTL simulation sweeps, and
// crossover location for the three flash systems (baseline, naive fixed-rate
// WOM, capacity-preserving WOM).
//
// Exit codes: 0 success; 1 computation failure or --check tolerance
// exceeded; 2 usage error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "womlab/errors.hpp"
#include "womlab/sweep.hpp"

namespace {

bool parse_sweep_arg(const std::string& text, womlab::sweep::AlphaRange& out) {
  std::istringstream is(text);
  std::string a, b, c;
  if (!std::getline(is, a, ':') || !std::getline(is, b, ':') || !std::getline(is, c)) return false;
  try {
    out.start = std::stod(a);
    out.stop = std::stod(b);
    out.step = std::stod(c);
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

int emit(const std::string& text, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream os(output_path);
  if (!os) {
    std::cerr << "error: cannot open " << output_path << " for writing\n";
    return 1;
  }
  os << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"erasure-factor analysis for WOM-coded flash FTLs"};
  app.set_config("--config", "", "key=value config file; command-line flags take precedence");

  std::vector<std::string> system_names;
  double alpha = -1.0;
  std::string sweep_arg;
  std::vector<int> t_list;
  double rate = womlab::model::kNaiveDefaultRate;
  double gamma1 = -1.0;
  bool simulate = false;
  double check_tol = -1.0;
  long blocks = 2048;
  int pages_per_block = 256;
  long long writes = 10'000'000;
  long long warmup = 0;
  std::uint64_t seed = 1;
  std::string format = "csv";
  std::string output_path;
  bool serial = false;

  app.add_option("--system", system_names,
                 "systems to evaluate: baseline, naive, cp (comma list or repeated)")
      ->delimiter(',');
  auto* alpha_opt = app.add_option("--alpha", alpha, "single storage rate alpha = U/T");
  auto* sweep_opt = app.add_option("--sweep", sweep_arg, "alpha sweep as start:stop:step");
  alpha_opt->excludes(sweep_opt);
  sweep_opt->excludes(alpha_opt);
  app.add_option("--t", t_list, "WOM write counts for naive/cp rows (default 2)")->delimiter(',');
  app.add_option("--rate", rate, "per-write rate of the fixed-rate naive code (default 0.77)");
  app.add_option("--gamma1", gamma1, "fix the cp stage-transition threshold instead of optimizing")
      ->check(CLI::Range(0.0, 1.0));
  app.add_flag("--simulate", simulate, "run the FTL simulator per point (t=2 systems)");
  app.add_option("--check", check_tol,
                 "with --simulate: exit 1 if any |rel_err| exceeds this tolerance");
  app.add_option("--blocks", blocks, "simulated blocks (default 2048)");
  app.add_option("--pages-per-block", pages_per_block, "pages per block Z (default 256)");
  app.add_option("--writes", writes, "measured writes per simulated point (default 1e7)");
  app.add_option("--warmup", warmup, "random warm-up writes (default 2x measured)");
  app.add_option("--seed", seed, "base RNG seed for simulated points")->envname("WOMLAB_SEED");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output", output_path, "write the table to this path instead of stdout");
  app.add_flag("--serial", serial, "evaluate sweep points without thread parallelism");

  auto* cross = app.add_subcommand("crossover", "alpha where two systems' EF curves meet");
  std::string cross_a;
  std::string cross_b;
  double cross_rate = womlab::model::kNaiveDefaultRate;
  cross->add_option("system_a", cross_a, "first system")->required();
  cross->add_option("system_b", cross_b, "second system")->required();
  cross->add_option("--rate", cross_rate, "naive per-write rate (default 0.77)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cross->parsed()) {
      const auto a = womlab::model::system_from_name(cross_a);
      const auto b = womlab::model::system_from_name(cross_b);
      if (!a || !b) {
        std::cerr << "error: systems must be baseline, naive, or cp\n";
        return 2;
      }
      const double x = womlab::sweep::find_crossover(*a, *b, cross_rate);
      std::cout << std::fixed << std::setprecision(4) << x << "\n";
      return 0;
    }

    if (system_names.empty()) {
      std::cerr << "error: --system is required (see --help)\n";
      return 2;
    }
    womlab::sweep::SweepSpec spec;
    for (const std::string& name : system_names) {
      const auto s = womlab::model::system_from_name(name);
      if (!s) {
        std::cerr << "error: unknown system '" << name << "'\n";
        return 2;
      }
      spec.systems.push_back(*s);
    }
    if (alpha_opt->count() > 0) {
      spec.alpha_range = {alpha, alpha, 1.0};
    } else if (sweep_opt->count() > 0) {
      if (!parse_sweep_arg(sweep_arg, spec.alpha_range)) {
        std::cerr << "error: --sweep wants start:stop:step\n";
        return 2;
      }
    } else {
      std::cerr << "error: one of --alpha or --sweep is required\n";
      return 2;
    }
    if (!t_list.empty()) spec.t_list = t_list;
    spec.rate = rate;
    if (gamma1 >= 0.0) spec.gamma1 = gamma1;
    spec.simulate = simulate || check_tol >= 0.0;

    auto& sim = spec.sim_defaults;
    sim.params.pages_per_block = pages_per_block;
    sim.params.physical_pages = static_cast<long>(pages_per_block) * blocks;
    sim.params.logical_pages = sim.params.physical_pages / 2;  // replaced per point
    sim.measured_writes = writes;
    sim.warmup_writes = warmup;
    sim.seed = seed;

    const auto rows = serial ? womlab::sweep::evaluate_serial(spec)
                             : womlab::sweep::evaluate_parallel(spec);
    const std::string text =
        format == "json" ? womlab::sweep::to_json(rows) : womlab::sweep::to_csv(rows);
    const int emit_rc = emit(text, output_path);
    if (emit_rc != 0) return emit_rc;

    if (check_tol >= 0.0) {
      for (const auto& row : rows) {
        if (row.feasible && row.rel_err && std::fabs(*row.rel_err) > check_tol) {
          std::cerr << "check failed: alpha=" << row.alpha << " system="
                    << womlab::model::system_name(row.system) << " rel_err=" << *row.rel_err
                    << " tol=" << check_tol << "\n";
          return 1;
        }
      }
    }
    return 0;
  } catch (const womlab::BracketError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
