#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace tvar {

enum class FKind {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  AX,
  EX,
  AF,
  EF,
  AG,
  EG,
  AU,
  EU,
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// CTL syntax tree. Binary and until nodes have two children, unary nodes
/// one, constants and atoms none.
struct Formula {
  FKind kind = FKind::True;
  std::string atom;
  std::vector<FormulaPtr> kids;

  const Formula &lhs() const { return *kids.at(0); }
  const Formula &rhs() const { return *kids.at(1); }
};

FormulaPtr make_const(bool value);
FormulaPtr make_atom(std::string name);
FormulaPtr make_unary(FKind kind, FormulaPtr a);
FormulaPtr make_binary(FKind kind, FormulaPtr a, FormulaPtr b);

/// Parses the property syntax; throws FormulaError on malformed text.
FormulaPtr parse_formula(std::string_view text);
/// Renders in the same syntax, fully parenthesized where needed.
std::string to_string(const Formula &f);

/// Negations pushed down to atoms; implications removed.
FormulaPtr normalize_nnf(const FormulaPtr &f);
bool is_nnf(const Formula &f);

/// Names of all atoms, in first-occurrence order.
std::vector<std::string> atoms_of(const Formula &f);
std::size_t depth(const Formula &f);

} // namespace tvar
