#pragma once

#include "tvar/bitvec3.hpp"
#include "tvar/sysir.hpp"

#include <memory>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tvar {

/// Per-state precision overrides on top of a uniform default mask.
///
/// Bits are only ever added. A state's effective (monotone) mask is the
/// union of the default and the overrides of every state covering it, so a
/// more concrete state is never less precise than one that covers it.
class PrecisionMap {
public:
  PrecisionMap() = default;
  PrecisionMap(unsigned width, BitMask default_mask);

  unsigned width() const { return width_; }
  BitMask default_mask() const { return default_; }

  struct Entry {
    TBitVec state;
    BitMask mask;
  };
  /// Overrides in the order they were first created.
  const std::vector<Entry> &overrides() const { return entries_; }

  /// Default plus the override stored for exactly this state.
  BitMask own_mask(const TBitVec &state) const;
  BitMask monotone_mask(const TBitVec &state) const;

  /// Adds `bit` to the override of `state`. Returns false if the own mask
  /// already had it.
  bool raise(const TBitVec &state, unsigned bit);

  /// True if every bit set in `prev` is still set here.
  bool extends(const PrecisionMap &prev) const;

  friend bool operator==(const PrecisionMap &a, const PrecisionMap &b);

private:
  unsigned width_ = 0;
  BitMask default_ = 0;
  std::vector<Entry> entries_;
  std::unordered_map<TBitVec, std::size_t, TBitVecHash> index_;
};

/// Value-returning form of PrecisionMap::raise.
PrecisionMap raise_precision(const PrecisionMap &pm, const TBitVec &state, unsigned bit);
/// Throws ContractViolation if `next` clears a bit that `prev` had.
void require_extends(const PrecisionMap &prev, const PrecisionMap &next);

enum class Strategy { Naive, Input, Decay };

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view text);

/// Deliberate defects used to show that the audits can fail.
enum class Fault {
  None,
  /// Use each state's own step mask instead of the monotone one.
  DropDecayClosure,
  /// Drop the last qualified input whenever an input is split.
  DropSplitHalf,
};

std::string_view to_string(Fault f);
std::optional<Fault> parse_fault(std::string_view text);

struct AbstractGA {
  std::shared_ptr<const SystemIR> ir;
  PrecisionMap pq;
  PrecisionMap pf;
  Fault fault = Fault::None;

  const SystemIR &system() const { return *ir; }
};

AbstractGA make_ga(std::shared_ptr<const SystemIR> ir, Strategy strategy);
/// Every input split and no decay anywhere.
AbstractGA make_full_precision_ga(std::shared_ptr<const SystemIR> ir);

TBitVec initial_abstract_state(const AbstractGA &aga);

BitMask input_mask(const AbstractGA &aga, const TBitVec &state);
BitMask step_mask(const AbstractGA &aga, const TBitVec &state);

/// All vectors of width `width` with the `split` bits concrete and the rest
/// X, ordered by the split bits read as a binary number.
std::vector<TBitVec> split_inputs(unsigned width, BitMask split);

std::vector<TBitVec> qualified_inputs(const AbstractGA &aga, const TBitVec &state);

/// Basic abstract step with every bit outside `precise` forced to X.
TBitVec decay(const TBitVec &basic, BitMask precise);

TBitVec abstract_step(const AbstractGA &aga, const TBitVec &state, const TBitVec &input);

} // namespace tvar
