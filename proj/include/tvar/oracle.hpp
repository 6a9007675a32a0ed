#pragma once

#include "tvar/formula.hpp"
#include "tvar/genauto.hpp"
#include "tvar/statespace.hpp"
#include "tvar/sysir.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tvar {

/// Reachable concrete Kripke structure, states as concrete vectors.
/// Throws ResourceLimit once more than `cap` states are reached.
PKS build_concrete_ks(const SystemIR &ir, std::size_t cap);

bool verify_concrete(const SystemIR &ir, const FormulaPtr &phi, std::size_t cap);

struct Violation {
  /// One of 6a..6d, 7a, 7b, 11a..11d, 12a..12c, init.
  std::string condition;
  std::string witness;
};

struct AuditReport {
  std::vector<Violation> violations;
  /// Violations per condition, including ones beyond the stored witnesses.
  std::map<std::string, std::size_t> counts;

  bool passed() const { return counts.empty(); }
  bool has(const std::string &condition) const { return counts.count(condition) != 0; }
  void add(const std::string &condition, std::string witness);
  void merge(const AuditReport &other);
  /// Sorts stored witnesses by condition and text.
  void canonicalize();
};

struct Sampler {
  enum class Mode {
    /// Every abstract state of the state space, or a random sample of them
    /// when there are more than `max_states`.
    Exhaustive,
    /// The reachable states of the generated structure.
    Reachable,
  };
  Mode mode = Mode::Reachable;
  /// Concretizations (or concrete inputs) enumerated per abstract vector
  /// before switching to random sampling.
  std::size_t max_concretizations = 64;
  std::size_t max_states = 4096;
  std::uint64_t seed = 1;
};

/// Checks the soundness conditions on sampled abstract states: exact initial
/// state, label soundness, input coverage, step soundness, and label / step
/// monotonicity against one-bit refinements.
AuditReport audit_soundness(const AbstractGA &aga, const Sampler &sampler = {});

/// Checks the full-precision conditions: exact labels and steps on singleton
/// states and singleton qualified inputs covering every concrete input.
AuditReport audit_terminating(const AbstractGA &aga, const Sampler &sampler = {});

/// Relation H = {(s, ŝ) : s in γ(ŝ)} over reachable states of both
/// structures, checked for label preservation and transition matching in
/// both directions plus the initial-state condition.
AuditReport check_modal_simulation(const PKS &ks, const PKS &pks);

} // namespace tvar
