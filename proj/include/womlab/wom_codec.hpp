#ifndef WOMLAB_WOM_CODEC_HPP
#define WOMLAB_WOM_CODEC_HPP

#include <cstdint>
#include <vector>

#include "womlab/analytic_models.hpp"

namespace womlab::wom {

// One cell per entry, values 0/1.  Cells may only transition 0 -> 1 between
// writes; an erase (new all-zero state) is the only way back.
using CellState = std::vector<std::uint8_t>;

int weight(const CellState& s);

// True iff `after` can be reached from `before` without any 1 -> 0 flip.
bool monotone_transition(const CellState& before, const CellState& after);

// The 2-bit / 3-cell two-write code.  Messages are 0..3.
//
// rs_encode(1, m, 000) writes m into a fresh triple; rs_encode(2, m, s)
// rewrites a first-write state s in place.  Rewriting the message that s
// already decodes to leaves s unchanged (required for two-write
// universality).  Preconditions are enforced: write 1 needs the all-zero
// state, write 2 needs a state reachable by a first write.  If the target
// codeword were not reachable monotonically a std::logic_error would be
// thrown; the exhaustive tests show it never is.
CellState rs_encode(int write_index, unsigned message, const CellState& state);

// Total decode map: weight <= 1 states use the first-write table
// (000 -> 0), weight >= 2 states the complement table.
unsigned rs_decode(const CellState& s);

// Rate-level view of a codec.  The simulator only consumes space
// accounting: how many physical page slots a stage-i logical page occupies
// and, for fixed-rate codes, how much each physical page grows.
struct CodecDescriptor {
  int n = 0;        // cells per codeword
  int writes = 0;   // t
  bool fixed_rate = false;
  std::vector<double> rates;          // R_1..R_t, R_i = log2(M_i)/n
  std::vector<double> message_sizes;  // M_1..M_t (saturates for huge n)

  double sum_rate() const;
  // Physical slots consumed by a stage-i logical page (1-based i):
  // ceil(1/R_i).
  int slot_span(int write_index) const;
  // Fixed-rate codes store payload at rate R in pages inflated by 1/R;
  // variable-rate codes keep pages at unit size.
  double page_inflation() const;
  // Page slots available per block of Z unit pages: round(R*Z) when pages
  // are inflated, Z otherwise.
  long slots_per_block(int pages_per_block) const;
};

// Descriptor of the 2-bit/3-cell code above: n=3, M=(4,4).
CodecDescriptor rs_descriptor();

// Descriptor for an ideal code achieving the requested rates exactly.
// Rates must lie in the capacity region; for t=2 this is checked against
// C2 and InfeasibleError is thrown otherwise (e.g. rates (1, 0.51)).
CodecDescriptor ideal_codec(const model::WomCodeSpec& spec);

}  // namespace womlab::wom

#endif
