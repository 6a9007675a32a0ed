#pragma once

#include "tvar/bitvec3.hpp"
#include "tvar/genauto.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace tvar {

using StateId = std::uint32_t;

struct Edge {
  StateId to;
  /// First qualified input that produced this transition.
  TBitVec via;
};

/// Explicit partial Kripke structure over abstract states.
struct PKS {
  unsigned state_width = 0;
  unsigned input_width = 0;
  std::vector<std::string> label_names;

  std::vector<TBitVec> states;
  StateId initial = 0;
  /// Outgoing transitions per state, deduplicated on the target.
  std::vector<std::vector<Edge>> edges;
  /// labels[state][label]
  std::vector<std::vector<TBit>> labels;

  /// Masks used when expanding each state; needed for incremental reuse.
  std::vector<BitMask> input_masks;
  std::vector<BitMask> step_masks;

  std::unordered_map<TBitVec, StateId, TBitVecHash> index;

  std::size_t state_count() const { return states.size(); }
  std::size_t transition_count() const;
  std::optional<StateId> find(const TBitVec &s) const;
  bool has_transition(StateId from, StateId to) const;
  /// True if some label value is Unknown.
  bool has_unknown_labels() const;

  /// Appends a state (no successors yet) and returns its id.
  StateId add_state(const TBitVec &s, std::vector<TBit> state_labels);
  /// Adds a transition unless (from, to) already exists. Returns true if added.
  bool add_transition(StateId from, StateId to, const TBitVec &via);
  void remove_transition(StateId from, StateId to);
};

struct BuildLimits {
  /// 0 means unlimited.
  std::size_t max_states = 0;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct BuildStats {
  /// States / transitions not present in the structure passed as `previous`.
  std::size_t states_generated = 0;
  std::size_t transitions_generated = 0;
  /// States whose successors were computed rather than reused.
  std::size_t states_expanded = 0;
};

/// Forward closure from the initial state. States are numbered in BFS
/// discovery order with successors visited in qualified-input order.
/// Successors of states in `previous` whose masks did not change are reused.
PKS build_pks(const AbstractGA &aga, const PKS *previous = nullptr,
              const BuildLimits &limits = {}, BuildStats *stats = nullptr);

/// Same states and same (from, to) pairs, compared by bit pattern.
bool same_relation(const PKS &a, const PKS &b);

/// Structural equality up to state numbering: same state patterns, same
/// (from, to) pattern pairs, same labels, same initial pattern.
bool structurally_equal(const PKS &a, const PKS &b);

/// GraphViz rendering of the structure.
std::string export_dot(const PKS &pks);

} // namespace tvar
