#include "womlab/wom_codec.hpp"

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>

#include "womlab/errors.hpp"

namespace womlab::wom {
namespace {

// First-write codewords, indexed by message; second writes use the
// bitwise complements of the same table.
constexpr std::uint8_t kFirst[4][3] = {
    {0, 0, 0},
    {1, 0, 0},
    {0, 1, 0},
    {0, 0, 1},
};

CellState first_codeword(unsigned m) {
  return {kFirst[m][0], kFirst[m][1], kFirst[m][2]};
}

CellState second_codeword(unsigned m) {
  return {static_cast<std::uint8_t>(1 - kFirst[m][0]),
          static_cast<std::uint8_t>(1 - kFirst[m][1]),
          static_cast<std::uint8_t>(1 - kFirst[m][2])};
}

void require_message(unsigned m) {
  if (m > 3) throw std::invalid_argument("rs_encode: message must be 2 bits");
}

void require_triple(const CellState& s, const char* who) {
  if (s.size() != 3) {
    throw std::invalid_argument(std::string(who) + ": state must have 3 cells");
  }
  for (std::uint8_t c : s) {
    if (c > 1) throw std::invalid_argument(std::string(who) + ": cells must be 0/1");
  }
}

}  // namespace

int weight(const CellState& s) {
  int w = 0;
  for (std::uint8_t c : s) w += c;
  return w;
}

bool monotone_transition(const CellState& before, const CellState& after) {
  if (before.size() != after.size()) return false;
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before[i] > after[i]) return false;
  }
  return true;
}

unsigned rs_decode(const CellState& s) {
  require_triple(s, "rs_decode");
  CellState key = s;
  if (weight(s) >= 2) {
    for (std::uint8_t& c : key) c = 1 - c;  // complement table
  }
  for (unsigned m = 0; m < 4; ++m) {
    if (key[0] == kFirst[m][0] && key[1] == kFirst[m][1] && key[2] == kFirst[m][2]) return m;
  }
  throw std::logic_error("rs_decode: unreachable");  // all weight<=1 triples are in the table
}

CellState rs_encode(int write_index, unsigned message, const CellState& state) {
  require_message(message);
  require_triple(state, "rs_encode");
  if (write_index == 1) {
    if (weight(state) != 0) {
      throw std::invalid_argument("rs_encode: first write needs the all-zero state");
    }
    return first_codeword(message);
  }
  if (write_index != 2) throw std::invalid_argument("rs_encode: write index must be 1 or 2");
  if (weight(state) > 1) {
    throw std::invalid_argument("rs_encode: second write needs a first-write state");
  }
  if (rs_decode(state) == message) return state;  // identical message: cells untouched
  CellState out = second_codeword(message);
  if (!monotone_transition(state, out)) {
    throw std::logic_error("rs_encode: no monotone codeword");  // never fires, tested exhaustively
  }
  return out;
}

double CodecDescriptor::sum_rate() const {
  double s = 0.0;
  for (double r : rates) s += r;
  return s;
}

int CodecDescriptor::slot_span(int write_index) const {
  if (write_index < 1 || write_index > writes) {
    throw std::invalid_argument("slot_span: write index out of range");
  }
  const double r = rates[static_cast<std::size_t>(write_index - 1)];
  return static_cast<int>(std::ceil(1.0 / r - 1e-9));
}

double CodecDescriptor::page_inflation() const {
  return fixed_rate ? 1.0 / rates.front() : 1.0;
}

long CodecDescriptor::slots_per_block(int pages_per_block) const {
  if (pages_per_block < 1) throw std::invalid_argument("slots_per_block: Z must be >= 1");
  if (!fixed_rate) return pages_per_block;
  return std::lround(rates.front() * pages_per_block);
}

CodecDescriptor rs_descriptor() {
  CodecDescriptor d;
  d.n = 3;
  d.writes = 2;
  d.fixed_rate = true;  // 2 bits into 3 cells on both writes
  d.rates = {2.0 / 3.0, 2.0 / 3.0};
  d.message_sizes = {4.0, 4.0};
  return d;
}

namespace {

// Smallest codeword length for which every R_i * n is (nearly) integral, so
// message sizes M_i = 2^{R_i n} are well defined.  Purely cosmetic: space
// accounting never looks at n or M_i.
int pick_length(const std::vector<double>& rates) {
  for (int n = 1; n <= 10000; ++n) {
    bool ok = true;
    for (double r : rates) {
      const double x = r * n;
      if (std::abs(x - std::round(x)) > 1e-6) {
        ok = false;
        break;
      }
    }
    if (ok) return n;
  }
  return 10000;
}

}  // namespace

CodecDescriptor ideal_codec(const model::WomCodeSpec& spec) {
  spec.validate();
  if (spec.writes == 2 && !model::capacity_contains(spec.rates[0], spec.rates[1])) {
    std::ostringstream msg;
    msg << "ideal_codec: rates (" << spec.rates[0] << ", " << spec.rates[1]
        << ") lie outside the two-write capacity region";
    throw InfeasibleError(msg.str());
  }
  CodecDescriptor d;
  d.writes = spec.writes;
  d.fixed_rate = spec.fixed_rate;
  d.rates = spec.rates;
  d.n = pick_length(spec.rates);
  d.message_sizes.reserve(spec.rates.size());
  for (double r : spec.rates) {
    d.message_sizes.push_back(std::exp2(std::round(r * d.n)));
  }
  return d;
}

}  // namespace womlab::wom
