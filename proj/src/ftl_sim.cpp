#include "womlab/ftl_sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "womlab/errors.hpp"

namespace womlab::sim {
namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

void SimConfig::validate() const {
  params.validate();
  if (params.physical_pages > std::numeric_limits<std::int32_t>::max()) {
    throw std::invalid_argument("SimConfig: geometry too large for 32-bit page ids");
  }
  if (measured_writes < 1) throw std::invalid_argument("SimConfig: measured_writes must be >= 1");
  if (warmup_writes < 0) throw std::invalid_argument("SimConfig: warmup_writes must be >= 0");
  switch (system) {
    case model::System::baseline:
      break;
    case model::System::naive_wom: {
      if (!(rate > 0.0 && rate <= 1.0)) {
        throw std::invalid_argument("SimConfig: naive rate must lie in (0, 1]");
      }
      const long zp = std::lround(rate * params.pages_per_block);
      if (zp < 1) throw std::invalid_argument("SimConfig: round(R*Z) must be >= 1");
      if (params.logical_pages > params.block_count() * zp) {
        throw std::invalid_argument("SimConfig: naive system needs U <= R*T (alpha <= R)");
      }
      break;
    }
    case model::System::cp_wom:
      if (!(gamma1 >= 0.0 && gamma1 <= 1.0)) {
        throw std::invalid_argument("SimConfig: gamma1 must lie in [0, 1]");
      }
      break;
  }
}

double ValidityHistogram::total() const {
  double t = free_blocks;
  for (const auto& stage : counts) {
    for (double c : stage) t += c;
  }
  return t;
}

FtlSimulator::FtlSimulator(const SimConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  if (cfg_.warmup_writes == 0) cfg_.warmup_writes = 2 * cfg_.measured_writes;
  system_ = cfg_.system;
  checking_ = cfg_.check_invariants;
  const auto& p = cfg_.params;
  slots_per_block_ = system_ == model::System::naive_wom
                         ? static_cast<int>(std::lround(cfg_.rate * p.pages_per_block))
                         : p.pages_per_block;
  num_blocks_ = static_cast<std::int32_t>(p.block_count());
  num_logical_ = static_cast<std::int32_t>(p.logical_pages);
  span2_ = system_ == model::System::cp_wom ? 2 : 1;
  threshold_pages_ = cfg_.gamma1 * slots_per_block_;

  Block proto;
  proto.slots.assign(static_cast<std::size_t>(slots_per_block_), SlotStatus::free_slot);
  proto.owner.assign(static_cast<std::size_t>(slots_per_block_), -1);
  blocks_.assign(static_cast<std::size_t>(num_blocks_), proto);
  map_.assign(static_cast<std::size_t>(num_logical_), PageLoc{});
  where_.assign(static_cast<std::size_t>(num_blocks_), Where::untouched);
  for (auto& h : live_hist_) h.assign(static_cast<std::size_t>(slots_per_block_) + 1, 0);
  for (auto& h : accum_hist_) h.assign(static_cast<std::size_t>(slots_per_block_) + 1, 0.0);
  rng_state_ = cfg_.seed;
}

const PageLoc& FtlSimulator::location(std::int32_t logical_id) const {
  if (logical_id < 0 || logical_id >= num_logical_) {
    throw std::out_of_range("location: logical id out of range");
  }
  return map_[static_cast<std::size_t>(logical_id)];
}

double FtlSimulator::mean_valid_at_erase() const {
  if (erase_events_ == 0) return 0.0;
  return double(sum_valid_at_erase_) / (double(erase_events_) * slots_per_block_);
}

std::uint64_t FtlSimulator::next_random_id() {
  // Lemire's multiply-shift keeps the draw unbiased enough for U ~ 1e6.
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(splitmix64(rng_state_)) * static_cast<std::uint64_t>(num_logical_);
  return static_cast<std::uint64_t>(wide >> 64);
}

void FtlSimulator::set_status(Block& b, std::int32_t slot, SlotStatus to) {
  if (checking_) {
    const SlotStatus from = b.slots[static_cast<std::size_t>(slot)];
    const bool ok = (from == SlotStatus::free_slot && to == SlotStatus::valid) ||
                    (from == SlotStatus::valid && to == SlotStatus::invalid) ||
                    (from == SlotStatus::invalid && to == SlotStatus::writable) ||
                    (from == SlotStatus::writable && to == SlotStatus::valid);
    if (!ok) throw std::logic_error("slot lifecycle violation");
  }
  b.slots[static_cast<std::size_t>(slot)] = to;
}

void FtlSimulator::bucket_move(int stage_from, int v_from, int stage_to, int v_to) {
  --live_hist_[static_cast<std::size_t>(stage_from - 1)][static_cast<std::size_t>(v_from)];
  ++live_hist_[static_cast<std::size_t>(stage_to - 1)][static_cast<std::size_t>(v_to)];
}

int FtlSimulator::pool_of(const Block& b) const {
  return system_ == model::System::cp_wom ? b.stage - 1 : 0;
}

void FtlSimulator::pool_insert(std::int32_t block_id) {
  const Block& b = blocks_[static_cast<std::size_t>(block_id)];
  pools_[static_cast<std::size_t>(pool_of(b))].insert({b.valid_count, block_id});
}

void FtlSimulator::pool_remove(std::int32_t block_id, std::int32_t old_valid) {
  const Block& b = blocks_[static_cast<std::size_t>(block_id)];
  pools_[static_cast<std::size_t>(pool_of(b))].erase({old_valid, block_id});
}

void FtlSimulator::invalidate(std::int32_t logical_id) {
  PageLoc& loc = map_[static_cast<std::size_t>(logical_id)];
  if (loc.block < 0) return;
  Block& b = blocks_[static_cast<std::size_t>(loc.block)];
  set_status(b, loc.slot, SlotStatus::invalid);
  b.owner[static_cast<std::size_t>(loc.slot)] = -1;
  if (loc.slot2 >= 0) {
    set_status(b, loc.slot2, SlotStatus::invalid);
    b.owner[static_cast<std::size_t>(loc.slot2)] = -1;
  }
  const std::int32_t old_valid = b.valid_count;
  const bool closed = where_[static_cast<std::size_t>(loc.block)] == Where::closed;
  if (closed) pool_remove(loc.block, old_valid);
  bucket_move(b.stage, old_valid, b.stage, old_valid - 1);
  b.valid_count = old_valid - 1;
  --total_valid_;
  if (closed) pool_insert(loc.block);
  loc = PageLoc{};
}

void FtlSimulator::write_stage1_slot(std::int32_t block_id, std::int32_t logical_id) {
  Block& b = blocks_[static_cast<std::size_t>(block_id)];
  const std::int32_t slot = b.free_cursor++;
  set_status(b, slot, SlotStatus::valid);
  b.owner[static_cast<std::size_t>(slot)] = logical_id;
  bucket_move(b.stage, b.valid_count, b.stage, b.valid_count + 1);
  ++b.valid_count;
  ++total_valid_;
  ++counters_.physical;
  ++lifetime_.physical;
  map_[static_cast<std::size_t>(logical_id)] = {block_id, slot, -1};
}

void FtlSimulator::write_stage2_page(std::int32_t block_id, std::int32_t logical_id) {
  Block& b = blocks_[static_cast<std::size_t>(block_id)];
  const std::int32_t s1 = b.writable[static_cast<std::size_t>(b.writable_cursor++)];
  set_status(b, s1, SlotStatus::valid);
  b.owner[static_cast<std::size_t>(s1)] = logical_id;
  ++counters_.physical;
  ++lifetime_.physical;
  std::int32_t s2 = -1;
  if (span2_ == 2) {
    s2 = b.writable[static_cast<std::size_t>(b.writable_cursor++)];
    set_status(b, s2, SlotStatus::valid);
    b.owner[static_cast<std::size_t>(s2)] = logical_id;
    ++counters_.physical;
    ++lifetime_.physical;
  }
  bucket_move(b.stage, b.valid_count, b.stage, b.valid_count + 1);
  ++b.valid_count;
  ++total_valid_;
  map_[static_cast<std::size_t>(logical_id)] = {block_id, s1, s2};
}

bool FtlSimulator::open_can_take() const {
  const Block& b = blocks_[static_cast<std::size_t>(open_)];
  if (b.stage == 1) return b.free_cursor < slots_per_block_;
  return b.writable_cursor + span2_ <= static_cast<std::int32_t>(b.writable.size());
}

void FtlSimulator::close_open() {
  where_[static_cast<std::size_t>(open_)] = Where::closed;
  pool_insert(open_);
  open_ = -1;
}

void FtlSimulator::place(std::int32_t logical_id) {
  // Each pass either places the page, opens a block, or performs one GC
  // action.  A full sweep of transitions plus erasures without a writable
  // slot appearing means the configuration cannot make progress.
  const long guard_max = 2L * num_blocks_ + 8;
  for (long guard = 0; guard < guard_max; ++guard) {
    if (open_ >= 0) {
      if (open_can_take()) {
        Block& b = blocks_[static_cast<std::size_t>(open_)];
        if (b.stage == 1) {
          write_stage1_slot(open_, logical_id);
        } else {
          write_stage2_page(open_, logical_id);
        }
        return;
      }
      close_open();
    }
    if (next_free_ < num_blocks_) {
      open_ = next_free_++;
      where_[static_cast<std::size_t>(open_)] = Where::open;
      ++live_hist_[0][0];  // enters tracking as a stage-1 block, 0 valid
    } else {
      gc_step();
    }
  }
  throw GcDeadlockError("no writable slot after a full GC sweep");
}

void FtlSimulator::gc_step() {
  if (system_ == model::System::cp_wom) {
    auto& p1 = pools_[0];
    auto& p2 = pools_[1];
    if (p1.empty() && p2.empty()) {
      throw GcDeadlockError("GC needed with no closed block in either stage");
    }
    if (!p1.empty() && !p2.empty()) {
      const auto [v1, b1] = *p1.begin();
      if (double(v1) <= threshold_pages_ + 1e-9) {
        transition_block(b1);
      } else {
        erase_block(p2.begin()->second);
      }
    } else if (!p1.empty()) {
      // One-sided fallback: with no stage-2 block to erase, the threshold
      // cannot apply; move the fullest-drained stage-1 block forward.
      transition_block(p1.begin()->second);
    } else {
      erase_block(p2.begin()->second);
    }
    return;
  }
  auto& pool = pools_[0];
  if (pool.empty()) throw GcDeadlockError("GC needed with no closed block");
  const std::int32_t victim = pool.begin()->second;
  if (system_ == model::System::naive_wom && blocks_[static_cast<std::size_t>(victim)].stage == 1) {
    transition_block(victim);
  } else {
    erase_block(victim);
  }
}

void FtlSimulator::transition_block(std::int32_t victim) {
  Block& b = blocks_[static_cast<std::size_t>(victim)];
  pool_remove(victim, b.valid_count);
  bucket_move(1, b.valid_count, 2, b.valid_count);
  b.stage = 2;
  b.writable.clear();
  b.writable_cursor = 0;
  // Writable slots are frozen now: pages invalidated later in this tenure
  // are not rewritten until the next erase.
  for (std::int32_t i = 0; i < slots_per_block_; ++i) {
    if (b.slots[static_cast<std::size_t>(i)] == SlotStatus::invalid) {
      set_status(b, i, SlotStatus::writable);
      b.writable.push_back(i);
    }
  }
  where_[static_cast<std::size_t>(victim)] = Where::open;
  open_ = victim;
}

void FtlSimulator::erase_block(std::int32_t victim) {
  Block& b = blocks_[static_cast<std::size_t>(victim)];
  pool_remove(victim, b.valid_count);

  std::vector<std::int32_t> survivors;
  survivors.reserve(static_cast<std::size_t>(b.valid_count));
  for (std::int32_t i = 0; i < slots_per_block_; ++i) {
    if (b.slots[static_cast<std::size_t>(i)] != SlotStatus::valid) continue;
    const std::int32_t id = b.owner[static_cast<std::size_t>(i)];
    const PageLoc& loc = map_[static_cast<std::size_t>(id)];
    if (loc.block == victim && loc.slot == i) survivors.push_back(id);  // primary slot only
  }
  if (checking_ && static_cast<std::int32_t>(survivors.size()) != b.valid_count) {
    throw std::logic_error("erase: survivor count != valid_count");
  }

  sum_valid_at_erase_ += b.valid_count;
  ++erase_events_;
  ++counters_.erases;
  ++lifetime_.erases;
  bucket_move(b.stage, b.valid_count, 1, 0);
  total_valid_ -= b.valid_count;

  // Wholesale reset: erase is the one path that may take any slot to free.
  std::fill(b.slots.begin(), b.slots.end(), SlotStatus::free_slot);
  std::fill(b.owner.begin(), b.owner.end(), -1);
  b.writable.clear();
  b.writable_cursor = 0;
  b.free_cursor = 0;
  b.stage = 1;
  b.valid_count = 0;
  where_[static_cast<std::size_t>(victim)] = Where::open;
  open_ = victim;

  // Copy-out: survivors land in the freshly erased block as stage-1 pages,
  // counting toward P but not L.
  for (std::int32_t id : survivors) write_stage1_slot(victim, id);
}

void FtlSimulator::step_write(std::int32_t logical_id) {
  if (logical_id < 0 || logical_id >= num_logical_) {
    throw std::out_of_range("step_write: logical id out of range");
  }
  invalidate(logical_id);
  place(logical_id);
  ++counters_.logical;
  ++lifetime_.logical;
}

ValidityHistogram FtlSimulator::snapshot_histogram() const {
  ValidityHistogram h;
  for (int s = 0; s < 2; ++s) {
    h.counts[static_cast<std::size_t>(s)].assign(live_hist_[static_cast<std::size_t>(s)].begin(),
                                                 live_hist_[static_cast<std::size_t>(s)].end());
  }
  h.free_blocks = double(num_blocks_ - next_free_);
  h.samples = 1;
  return h;
}

void FtlSimulator::reset_measurement() {
  counters_ = Counters{};
  sum_valid_at_erase_ = 0;
  erase_events_ = 0;
  for (auto& h : accum_hist_) std::fill(h.begin(), h.end(), 0.0);
  accum_free_ = 0.0;
  hist_samples_ = 0;
}

void FtlSimulator::accumulate_histogram() {
  for (int s = 0; s < 2; ++s) {
    auto& acc = accum_hist_[static_cast<std::size_t>(s)];
    const auto& live = live_hist_[static_cast<std::size_t>(s)];
    for (std::size_t i = 0; i < live.size(); ++i) acc[i] += double(live[i]);
  }
  accum_free_ += double(num_blocks_ - next_free_);
  ++hist_samples_;
}

void FtlSimulator::check_conservation() const {
  long long sum = 0;
  std::size_t closed = 0;
  for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
    sum += blocks_[bi].valid_count;
    if (where_[bi] == Where::closed) ++closed;
  }
  if (sum != total_valid_) throw std::logic_error("conservation: cached total diverged");
  if (total_valid_ != num_logical_) throw std::logic_error("conservation: sum of valid != U");
  if (closed != pools_[0].size() + pools_[1].size()) {
    throw std::logic_error("conservation: pool membership diverged");
  }
}

SimReport FtlSimulator::run() {
  if (ran_) throw std::logic_error("FtlSimulator::run is one-shot");
  ran_ = true;
  const auto t0 = std::chrono::steady_clock::now();

  for (std::int32_t id = 0; id < num_logical_; ++id) step_write(id);
  for (long long i = 0; i < cfg_.warmup_writes; ++i) {
    step_write(static_cast<std::int32_t>(next_random_id()));
  }
  reset_measurement();

  const long long hist_every = slots_per_block_;
  for (long long i = 1; i <= cfg_.measured_writes; ++i) {
    step_write(static_cast<std::int32_t>(next_random_id()));
    if (cfg_.collect_histogram && i % hist_every == 0) accumulate_histogram();
    if (checking_ && i % 4096 == 0) check_conservation();
  }

  SimReport rep;
  rep.config = cfg_;
  rep.counters = counters_;
  rep.ef = double(counters_.erases) * slots_per_block_ / double(counters_.logical);
  rep.wa = double(counters_.physical) / double(counters_.logical);
  if (system_ == model::System::cp_wom) rep.gamma2_measured = mean_valid_at_erase();
  if (cfg_.collect_histogram && hist_samples_ > 0) {
    ValidityHistogram h;
    for (int s = 0; s < 2; ++s) {
      auto& out = h.counts[static_cast<std::size_t>(s)];
      const auto& acc = accum_hist_[static_cast<std::size_t>(s)];
      out.resize(acc.size());
      for (std::size_t i = 0; i < acc.size(); ++i) out[i] = acc[i] / double(hist_samples_);
    }
    h.free_blocks = accum_free_ / double(hist_samples_);
    h.samples = hist_samples_;
    if (system_ == model::System::baseline) {
      // Plateau diagnostic: on (Y, Z] the steady-state theory predicts
      // i*N(i) constant; report its spread, don't enforce it.
      const int lo = static_cast<int>(std::floor(mean_valid_at_erase() * slots_per_block_)) + 2;
      const int hi = slots_per_block_ - 1;
      if (hi - lo + 1 >= 3) {
        double mean = 0.0;
        for (int i = lo; i <= hi; ++i) mean += i * h.counts[0][static_cast<std::size_t>(i)];
        mean /= double(hi - lo + 1);
        double var = 0.0;
        for (int i = lo; i <= hi; ++i) {
          const double d = i * h.counts[0][static_cast<std::size_t>(i)] - mean;
          var += d * d;
        }
        var /= double(hi - lo + 1);
        if (mean > 0.0) rep.plateau_rsd = std::sqrt(var) / mean;
      }
    }
    rep.histogram = std::move(h);
  }
  rep.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

std::string SimReport::to_json(int indent) const {
  nlohmann::json j;
  nlohmann::json c;
  c["system"] = model::system_name(config.system);
  c["pages_per_block"] = config.params.pages_per_block;
  c["blocks"] = config.params.block_count();
  c["physical_pages"] = config.params.physical_pages;
  c["logical_pages"] = config.params.logical_pages;
  c["alpha"] = config.params.storage_rate();
  if (config.system == model::System::naive_wom) c["rate"] = config.rate;
  if (config.system == model::System::cp_wom) c["gamma1"] = config.gamma1;
  c["warmup_writes"] = config.warmup_writes;
  c["measured_writes"] = config.measured_writes;
  c["seed"] = config.seed;
  j["config"] = std::move(c);
  j["erases"] = counters.erases;
  j["logical_writes"] = counters.logical;
  j["physical_writes"] = counters.physical;
  j["ef"] = ef;
  j["wa"] = wa;
  if (gamma2_measured) j["gamma2_measured"] = *gamma2_measured;
  if (plateau_rsd) j["plateau_rsd"] = *plateau_rsd;
  if (histogram) {
    j["histogram"] = {{"stage1", histogram->counts[0]},
                      {"stage2", histogram->counts[1]},
                      {"free_blocks", histogram->free_blocks},
                      {"samples", histogram->samples}};
  }
  j["wall_time_seconds"] = wall_time_seconds;
  return indent < 0 ? j.dump() : j.dump(indent);
}

SimReport run_baseline(const SimConfig& cfg) {
  if (cfg.system != model::System::baseline) {
    throw std::invalid_argument("run_baseline: config.system mismatch");
  }
  return FtlSimulator(cfg).run();
}

SimReport run_naive(const SimConfig& cfg) {
  if (cfg.system != model::System::naive_wom) {
    throw std::invalid_argument("run_naive: config.system mismatch");
  }
  return FtlSimulator(cfg).run();
}

SimReport run_cp_wom(const SimConfig& cfg) {
  if (cfg.system != model::System::cp_wom) {
    throw std::invalid_argument("run_cp_wom: config.system mismatch");
  }
  return FtlSimulator(cfg).run();
}

SimReport run_simulation(const SimConfig& cfg) {
  switch (cfg.system) {
    case model::System::baseline:
      return run_baseline(cfg);
    case model::System::naive_wom:
      return run_naive(cfg);
    case model::System::cp_wom:
      return run_cp_wom(cfg);
  }
  throw std::invalid_argument("run_simulation: unknown system");
}

}  // namespace womlab::sim
