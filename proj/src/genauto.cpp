#include "tvar/genauto.hpp"

#include "tvar/errors.hpp"

namespace tvar {

PrecisionMap::PrecisionMap(unsigned width, BitMask default_mask)
    : width_(width), default_(default_mask & width_mask(width)) {
  if (width > kMaxWidth)
    throw ContractViolation("precision map width exceeds " + std::to_string(kMaxWidth));
}

BitMask PrecisionMap::own_mask(const TBitVec &state) const {
  auto it = index_.find(state);
  return it == index_.end() ? default_ : default_ | entries_[it->second].mask;
}

BitMask PrecisionMap::monotone_mask(const TBitVec &state) const {
  BitMask m = default_;
  for (const auto &e : entries_)
    if ((e.mask & ~m) && covers(e.state, state))
      m |= e.mask;
  return m;
}

bool PrecisionMap::raise(const TBitVec &state, unsigned bit) {
  if (bit >= width_)
    throw ContractViolation("precision bit " + std::to_string(bit) + " out of range for width " +
                            std::to_string(width_));
  const BitMask b = BitMask{1} << bit;
  if (default_ & b)
    return false;
  auto it = index_.find(state);
  if (it == index_.end()) {
    index_.emplace(state, entries_.size());
    entries_.push_back({state, b});
    return true;
  }
  BitMask &m = entries_[it->second].mask;
  if (m & b)
    return false;
  m |= b;
  return true;
}

bool PrecisionMap::extends(const PrecisionMap &prev) const {
  if (prev.width_ != width_ || (prev.default_ & ~default_))
    return false;
  for (const auto &e : prev.entries_)
    if (e.mask & ~own_mask(e.state))
      return false;
  return true;
}

bool operator==(const PrecisionMap &a, const PrecisionMap &b) {
  return a.extends(b) && b.extends(a);
}

PrecisionMap raise_precision(const PrecisionMap &pm, const TBitVec &state, unsigned bit) {
  PrecisionMap out = pm;
  out.raise(state, bit);
  return out;
}

void require_extends(const PrecisionMap &prev, const PrecisionMap &next) {
  if (!next.extends(prev))
    throw ContractViolation("precision map clears a bit set by its predecessor");
}

std::string_view to_string(Strategy s) {
  switch (s) {
  case Strategy::Naive:
    return "naive";
  case Strategy::Input:
    return "input";
  case Strategy::Decay:
    return "decay";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  for (auto s : {Strategy::Naive, Strategy::Input, Strategy::Decay})
    if (to_string(s) == text)
      return s;
  return std::nullopt;
}

std::string_view to_string(Fault f) {
  switch (f) {
  case Fault::None:
    return "none";
  case Fault::DropDecayClosure:
    return "drop-decay-closure";
  case Fault::DropSplitHalf:
    return "drop-split-half";
  }
  return "?";
}

std::optional<Fault> parse_fault(std::string_view text) {
  for (auto f : {Fault::None, Fault::DropDecayClosure, Fault::DropSplitHalf})
    if (to_string(f) == text)
      return f;
  return std::nullopt;
}

AbstractGA make_ga(std::shared_ptr<const SystemIR> ir, Strategy strategy) {
  const unsigned w = ir->state_width(), y = ir->input_width();
  AbstractGA aga;
  switch (strategy) {
  case Strategy::Naive:
    aga.pq = PrecisionMap(y, width_mask(y));
    aga.pf = PrecisionMap(w, width_mask(w));
    break;
  case Strategy::Input:
    aga.pq = PrecisionMap(y, 0);
    aga.pf = PrecisionMap(w, width_mask(w));
    break;
  case Strategy::Decay:
    aga.pq = PrecisionMap(y, 0);
    aga.pf = PrecisionMap(w, 0);
    break;
  }
  aga.ir = std::move(ir);
  return aga;
}

AbstractGA make_full_precision_ga(std::shared_ptr<const SystemIR> ir) {
  return make_ga(std::move(ir), Strategy::Naive);
}

TBitVec initial_abstract_state(const AbstractGA &aga) {
  return TBitVec(aga.ir->initial_state());
}

BitMask input_mask(const AbstractGA &aga, const TBitVec &state) {
  return aga.pq.monotone_mask(state);
}

BitMask step_mask(const AbstractGA &aga, const TBitVec &state) {
  if (aga.fault == Fault::DropDecayClosure)
    return aga.pf.own_mask(state);
  return aga.pf.monotone_mask(state);
}

std::vector<TBitVec> split_inputs(unsigned width, BitMask split) {
  split &= width_mask(width);
  const BitMask unknown = width_mask(width) & ~split;
  std::vector<TBitVec> out;
  out.reserve(std::size_t{1} << std::popcount(split));
  // Ascending submask enumeration equals ascending order of the split bits
  // read as a binary number.
  BitMask sub = 0;
  do {
    out.push_back(TBitVec::from_masks(width, sub, unknown));
    sub = (sub - split) & split;
  } while (sub != 0);
  return out;
}

std::vector<TBitVec> qualified_inputs(const AbstractGA &aga, const TBitVec &state) {
  auto out = split_inputs(aga.ir->input_width(), input_mask(aga, state));
  if (aga.fault == Fault::DropSplitHalf && out.size() > 1)
    out.pop_back();
  return out;
}

TBitVec decay(const TBitVec &basic, BitMask precise) {
  const BitMask forced = width_mask(basic.width()) & ~precise;
  return TBitVec::from_masks(basic.width(), basic.ones() & ~forced,
                             basic.unknown_mask() | forced);
}

TBitVec abstract_step(const AbstractGA &aga, const TBitVec &state, const TBitVec &input) {
  return decay(abstract_next(*aga.ir, state, input), step_mask(aga, state));
}

} // namespace tvar
