#pragma once

#include "tvar/genauto.hpp"
#include "tvar/mc3.hpp"
#include "tvar/statespace.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tvar {

enum class CandidateKind { StepBit, InputBit };

std::string_view to_string(CandidateKind k);

struct RefinementCandidate {
  CandidateKind kind = CandidateKind::InputBit;
  TBitVec state;
  unsigned bit = 0;
  /// Backward steps from the culprit state to `state`.
  unsigned distance = 0;

  friend bool operator==(const RefinementCandidate &, const RefinementCandidate &) = default;
};

/// A ⊥ literal reached from the initial state through Unknown subformulas.
struct Culprit {
  /// States from the initial state to the culprit state.
  std::vector<StateId> path;
  /// vias[j] is the qualified input of the transition path[j] -> path[j+1].
  std::vector<TBitVec> vias;
  std::size_t label = 0;
};

std::optional<Culprit> find_culprit(const PKS &pks, const Labelling &lab);

/// Ordered refinement candidates for an Unknown verdict. Throws
/// ContractViolation if the root is not Unknown at the initial state.
std::vector<RefinementCandidate> propose_candidates(const AbstractGA &aga, const PKS &pks,
                                                    const Labelling &lab);

/// Every unset step bit and then every unset input bit of every state, in
/// state order. Used when the heuristic candidates do not change R.
std::vector<RefinementCandidate> exhaustive_candidates(const AbstractGA &aga, const PKS &pks);

struct RaiseEvent {
  std::size_t iteration = 0;
  CandidateKind kind = CandidateKind::InputBit;
  TBitVec state;
  unsigned bit = 0;
  bool r_changed = false;
};

struct RefineResult {
  AbstractGA aga;
  PKS pks;
  bool changed = false;
  std::vector<RaiseEvent> raises;
  std::size_t states_generated = 0;
  std::size_t transitions_generated = 0;
};

/// Raises candidates in order, rebuilding after each, until R differs from
/// that of `pks`. Every applied raise is kept even if R never changes.
RefineResult apply_candidates(const AbstractGA &aga,
                              const std::vector<RefinementCandidate> &candidates,
                              const PKS &pks, const BuildLimits &limits = {},
                              std::size_t iteration = 0);

/// As apply_candidates, but throws InternalError listing the applied bits if
/// R does not change.
RefineResult refine_strict(const AbstractGA &aga,
                           const std::vector<RefinementCandidate> &candidates, const PKS &pks,
                           const BuildLimits &limits = {}, std::size_t iteration = 0);

struct VerifyLimits {
  std::size_t max_refinements = 10000;
  /// 0 means unlimited.
  std::size_t max_states = 0;
  /// Seconds; 0 means unlimited.
  double timeout_s = 0;
};

struct VerifyStats {
  std::size_t refinements = 0;
  std::size_t states_total = 0;
  std::size_t states_final = 0;
  std::size_t transitions_total = 0;
  std::size_t transitions_final = 0;
  double wall_time_s = 0;
  /// Raises that changed a precision map.
  std::size_t raises = 0;
  /// Distinct abstract states holding an override in either map.
  std::size_t raised_states = 0;
  /// Refinements that needed the exhaustive candidate list.
  std::size_t fallback_refinements = 0;
};

struct IterationView {
  std::size_t iteration;
  const AbstractGA &aga;
  const PKS &pks;
  const MC3Result &mc;
};

struct VerifyOptions {
  VerifyLimits limits;
  Fault fault = Fault::None;
  std::function<void(const IterationView &)> on_iteration;
  std::function<void(const RaiseEvent &)> on_raise;
};

struct VerifyOutcome {
  ThreeValued result = ThreeValued::Unknown;
  VerifyStats stats;
  bool limit_hit = false;
  std::string limit_reason;
  AbstractGA aga;
  /// The last structure that was model checked (empty if none was built).
  PKS pks;
};

VerifyOutcome verify_loop(std::shared_ptr<const SystemIR> ir, const FormulaPtr &phi,
                          Strategy strategy, const VerifyOptions &options = {});

} // namespace tvar
