#pragma once

#include "tvar/formula.hpp"
#include "tvar/statespace.hpp"

#include <string_view>
#include <vector>

namespace tvar {

enum class ThreeValued { False, True, Unknown };

std::string_view to_string(ThreeValued v);

/// One satisfaction bit per state.
using StateSet = std::vector<char>;

/// Per-subformula results of the two completion runs over the NNF property.
/// A subformula is Unknown at a state when the optimistic run satisfies it
/// and the pessimistic run does not.
struct Labelling {
  FormulaPtr nnf;
  /// Post-order; the root is last.
  std::vector<const Formula *> subformulas;
  std::vector<StateSet> pessimistic;
  std::vector<StateSet> optimistic;

  std::size_t root() const { return subformulas.size() - 1; }
  std::size_t index_of(const Formula *f) const;
  ThreeValued value(StateId s, std::size_t sub) const;
};

struct MC3Result {
  ThreeValued value = ThreeValued::Unknown;
  Labelling labelling;
};

struct MC2Result {
  bool value = false;
  /// Post-order subformulas of the checked formula and their state sets.
  std::vector<const Formula *> subformulas;
  std::vector<StateSet> sets;
};

/// Standard CTL labelling. Throws ContractViolation if a label is Unknown and
/// FormulaError if an atom is not a label of the structure.
MC2Result model_check2(const PKS &ks, const FormulaPtr &phi);

/// Three-valued check via the pessimistic and optimistic completions.
MC3Result model_check3(const PKS &pks, const FormulaPtr &phi);

/// Throws FormulaError naming the first atom that is not in `labels`.
void check_atoms(const Formula &phi, const std::vector<std::string> &labels);

} // namespace tvar
