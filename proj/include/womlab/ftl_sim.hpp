#ifndef WOMLAB_FTL_SIM_HPP
#define WOMLAB_FTL_SIM_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "womlab/analytic_models.hpp"

namespace womlab::sim {

// A slot is one physical page's worth of space inside a block.  Lifecycle:
//   free -> valid -> invalid -> (stage transition) -> writable -> valid ...
// and anything -> free at erase.  Rewriting an invalid slot without an
// intervening stage transition never happens.
enum class SlotStatus : std::uint8_t { free_slot, valid, invalid, writable };

struct SimConfig {
  model::System system = model::System::baseline;
  // Z = 256 pages per block, 2048 blocks, half-full device by default.
  model::SystemParams params{256, 256L * 2048, 256L * 1024};
  double rate = model::kNaiveDefaultRate;  // per-write WOM rate (naive only)
  double gamma1 = 0.0;                     // stage-transition threshold (cp only)
  long long warmup_writes = 0;             // random warm-up; 0 = 2 * measured_writes
  long long measured_writes = 10'000'000;
  std::uint64_t seed = 1;
  bool collect_histogram = false;
  bool check_invariants = false;

  // Geometry checks plus per-system preconditions (naive: U must fit in
  // round(R*Z) slots per block; cp: gamma1 in [0,1]).
  void validate() const;
};

struct Counters {
  long long logical = 0;   // L: requests served
  long long physical = 0;  // P: page slots written (copies included)
  long long erases = 0;    // E
};

// counts[s-1][i] = number of stage-(s) blocks holding i valid logical
// pages; doubles because the report form is time-averaged.
struct ValidityHistogram {
  std::array<std::vector<double>, 2> counts;
  double free_blocks = 0.0;
  long long samples = 1;

  double total() const;  // sum of all counts + free_blocks
};

struct SimReport {
  SimConfig config;  // echo, with warmup_writes resolved
  Counters counters;
  double ef = 0.0;  // E / (L / slots_per_block)
  double wa = 0.0;  // P / L
  // cp only: mean valid fraction of a block at the moment of erase.
  std::optional<double> gamma2_measured;
  // baseline only, with histogram: relative stddev of i*N(i) on the
  // steady-state plateau (soft diagnostic).
  std::optional<double> plateau_rsd;
  std::optional<ValidityHistogram> histogram;  // time-averaged
  double wall_time_seconds = 0.0;

  std::string to_json(int indent = -1) const;
};

struct Block {
  std::vector<SlotStatus> slots;
  std::vector<std::int32_t> owner;     // logical id per slot, -1 if none
  std::vector<std::int32_t> writable;  // invalid slots frozen at the stage transition
  std::int32_t stage = 1;
  std::int32_t valid_count = 0;
  std::int32_t free_cursor = 0;      // next free slot (stage-1 tenure fills in order)
  std::int32_t writable_cursor = 0;  // consumed prefix of `writable`
};

struct PageLoc {
  std::int32_t block = -1;
  std::int32_t slot = -1;
  std::int32_t slot2 = -1;  // partner slot of a two-slot (cp stage-2) page
};

class FtlSimulator {
 public:
  explicit FtlSimulator(const SimConfig& cfg);

  // One out-of-place logical write request: invalidates the previous
  // location, then allocates per the system's rules, running GC as needed.
  void step_write(std::int32_t logical_id);

  // Full measurement protocol: sequential fill of all U pages, random
  // warm-up, counter reset, measured random phase.  One-shot.
  SimReport run();

  ValidityHistogram snapshot_histogram() const;

  const SimConfig& config() const { return cfg_; }
  const Counters& counters() const { return counters_; }
  // Never reset; bounds like P <= (E + blocks) * slots_per_block hold on
  // these over the whole history.
  const Counters& lifetime_counters() const { return lifetime_; }
  int slots_per_block() const { return slots_per_block_; }
  std::int32_t block_count() const { return num_blocks_; }
  long long total_valid() const { return total_valid_; }
  const Block& block(std::int32_t id) const { return blocks_[static_cast<std::size_t>(id)]; }
  std::int32_t open_block() const { return open_; }
  const PageLoc& location(std::int32_t logical_id) const;
  // Mean valid fraction at erase since the last counter reset (any system).
  double mean_valid_at_erase() const;

 private:
  void invalidate(std::int32_t logical_id);
  void place(std::int32_t logical_id);
  bool open_can_take() const;
  void close_open();
  void gc_step();
  void erase_block(std::int32_t victim);
  void transition_block(std::int32_t victim);
  void write_stage1_slot(std::int32_t block_id, std::int32_t logical_id);
  void write_stage2_page(std::int32_t block_id, std::int32_t logical_id);
  int pool_of(const Block& b) const;
  void pool_insert(std::int32_t block_id);
  void pool_remove(std::int32_t block_id, std::int32_t old_valid);
  void set_status(Block& b, std::int32_t slot, SlotStatus to);
  void bucket_move(int stage_from, int v_from, int stage_to, int v_to);
  void reset_measurement();
  void accumulate_histogram();
  void check_conservation() const;
  std::uint64_t next_random_id();

  SimConfig cfg_;
  model::System system_;
  int slots_per_block_ = 0;
  std::int32_t num_blocks_ = 0;
  std::int32_t num_logical_ = 0;
  int span2_ = 1;  // slots a stage-2 logical page consumes
  double threshold_pages_ = 0.0;
  bool checking_ = false;

  std::vector<Block> blocks_;
  std::vector<PageLoc> map_;
  // Closed blocks keyed by (valid_count, id): begin() is the greedy victim.
  // baseline/naive use pool 0 for every stage; cp keeps one per stage.
  std::array<std::set<std::pair<std::int32_t, std::int32_t>>, 2> pools_;
  enum class Where : std::uint8_t { untouched, open, closed };
  std::vector<Where> where_;
  std::int32_t open_ = -1;
  std::int32_t next_free_ = 0;

  Counters counters_;
  Counters lifetime_;
  long long total_valid_ = 0;
  long long sum_valid_at_erase_ = 0;
  long long erase_events_ = 0;

  std::array<std::vector<long long>, 2> live_hist_;
  std::array<std::vector<double>, 2> accum_hist_;
  double accum_free_ = 0.0;
  long long hist_samples_ = 0;

  std::uint64_t rng_state_ = 0;
  bool ran_ = false;
};

// Convenience wrappers enforcing cfg.system, per the three system models.
SimReport run_baseline(const SimConfig& cfg);
SimReport run_naive(const SimConfig& cfg);
SimReport run_cp_wom(const SimConfig& cfg);
// Dispatch on cfg.system.
SimReport run_simulation(const SimConfig& cfg);

}  // namespace womlab::sim

#endif
