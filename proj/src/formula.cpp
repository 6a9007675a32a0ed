#include "tvar/formula.hpp"

#include "tvar/errors.hpp"

#include <algorithm>
#include <cctype>

namespace tvar {

FormulaPtr make_const(bool value) {
  auto f = std::make_shared<Formula>();
  f->kind = value ? FKind::True : FKind::False;
  return f;
}

FormulaPtr make_atom(std::string name) {
  auto f = std::make_shared<Formula>();
  f->kind = FKind::Atom;
  f->atom = std::move(name);
  return f;
}

FormulaPtr make_unary(FKind kind, FormulaPtr a) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->kids = {std::move(a)};
  return f;
}

FormulaPtr make_binary(FKind kind, FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->kids = {std::move(a), std::move(b)};
  return f;
}

namespace {

// Precedence, loosest first: ->, |, &, unary.
class FormulaParser {
public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  FormulaPtr parse() {
    FormulaPtr f = parse_implies();
    skip_ws();
    if (pos_ != text_.size())
      fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

private:
  [[noreturn]] void fail(const std::string &msg) const {
    throw FormulaError("property column " + std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view tok) {
    if (!accept(tok))
      fail("expected '" + std::string(tok) + "'");
  }

  std::string peek_ident() {
    skip_ws();
    std::size_t p = pos_;
    if (p < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[p])) || text_[p] == '_')) {
      while (p < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[p])) || text_[p] == '_'))
        ++p;
    }
    return std::string(text_.substr(pos_, p - pos_));
  }

  FormulaPtr parse_implies() {
    FormulaPtr lhs = parse_or();
    if (accept("->"))
      return make_binary(FKind::Implies, lhs, parse_implies());
    return lhs;
  }

  FormulaPtr parse_or() {
    FormulaPtr lhs = parse_and();
    while (accept("|"))
      lhs = make_binary(FKind::Or, lhs, parse_and());
    return lhs;
  }

  FormulaPtr parse_and() {
    FormulaPtr lhs = parse_unary();
    while (accept("&"))
      lhs = make_binary(FKind::And, lhs, parse_unary());
    return lhs;
  }

  FormulaPtr parse_until(FKind kind) {
    expect("[");
    FormulaPtr a = parse_implies();
    skip_ws();
    if (peek_ident() != "U")
      fail("expected 'U'");
    pos_ += 1;
    FormulaPtr b = parse_implies();
    expect("]");
    return make_binary(kind, a, b);
  }

  FormulaPtr parse_unary() {
    skip_ws();
    if (pos_ >= text_.size())
      fail("unexpected end of property");
    if (accept("!"))
      return make_unary(FKind::Not, parse_unary());
    if (accept("(")) {
      FormulaPtr f = parse_implies();
      expect(")");
      return f;
    }
    const std::string id = peek_ident();
    if (id.empty())
      fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    static const std::pair<const char *, FKind> temporal[] = {
        {"AX", FKind::AX}, {"EX", FKind::EX}, {"AF", FKind::AF},
        {"EF", FKind::EF}, {"AG", FKind::AG}, {"EG", FKind::EG},
    };
    for (const auto &[name, kind] : temporal) {
      if (id == name) {
        pos_ += id.size();
        return make_unary(kind, parse_unary());
      }
    }
    if (id == "A" || id == "E") {
      const std::size_t save = pos_;
      pos_ += 1;
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '[')
        return parse_until(id == "A" ? FKind::AU : FKind::EU);
      pos_ = save;
    }
    pos_ += id.size();
    if (id == "true")
      return make_const(true);
    if (id == "false")
      return make_const(false);
    if (id == "U")
      fail("unexpected 'U'");
    return make_atom(id);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

const char *unary_name(FKind k) {
  switch (k) {
  case FKind::AX:
    return "AX";
  case FKind::EX:
    return "EX";
  case FKind::AF:
    return "AF";
  case FKind::EF:
    return "EF";
  case FKind::AG:
    return "AG";
  case FKind::EG:
    return "EG";
  default:
    return nullptr;
  }
}

} // namespace

FormulaPtr parse_formula(std::string_view text) { return FormulaParser(text).parse(); }

std::string to_string(const Formula &f) {
  switch (f.kind) {
  case FKind::True:
    return "true";
  case FKind::False:
    return "false";
  case FKind::Atom:
    return f.atom;
  case FKind::Not:
    return "!" + to_string(f.lhs());
  case FKind::And:
    return "(" + to_string(f.lhs()) + " & " + to_string(f.rhs()) + ")";
  case FKind::Or:
    return "(" + to_string(f.lhs()) + " | " + to_string(f.rhs()) + ")";
  case FKind::Implies:
    return "(" + to_string(f.lhs()) + " -> " + to_string(f.rhs()) + ")";
  case FKind::AU:
    return "A[" + to_string(f.lhs()) + " U " + to_string(f.rhs()) + "]";
  case FKind::EU:
    return "E[" + to_string(f.lhs()) + " U " + to_string(f.rhs()) + "]";
  default:
    return std::string(unary_name(f.kind)) + "(" + to_string(f.lhs()) + ")";
  }
}

namespace {

FormulaPtr nnf(const FormulaPtr &f, bool negate) {
  switch (f->kind) {
  case FKind::True:
  case FKind::False:
    return make_const((f->kind == FKind::True) != negate);
  case FKind::Atom:
    return negate ? make_unary(FKind::Not, f) : f;
  case FKind::Not:
    return nnf(f->kids[0], !negate);
  case FKind::And:
    return make_binary(negate ? FKind::Or : FKind::And, nnf(f->kids[0], negate),
                       nnf(f->kids[1], negate));
  case FKind::Or:
    return make_binary(negate ? FKind::And : FKind::Or, nnf(f->kids[0], negate),
                       nnf(f->kids[1], negate));
  case FKind::Implies:
    // a -> b == !a | b
    if (negate)
      return make_binary(FKind::And, nnf(f->kids[0], false), nnf(f->kids[1], true));
    return make_binary(FKind::Or, nnf(f->kids[0], true), nnf(f->kids[1], false));
  case FKind::AX:
  case FKind::EX:
  case FKind::AF:
  case FKind::EF:
  case FKind::AG:
  case FKind::EG: {
    static const std::pair<FKind, FKind> duals[] = {
        {FKind::AX, FKind::EX}, {FKind::EX, FKind::AX}, {FKind::AF, FKind::EG},
        {FKind::EF, FKind::AG}, {FKind::AG, FKind::EF}, {FKind::EG, FKind::AF},
    };
    FKind k = f->kind;
    if (negate)
      for (const auto &[from, to] : duals)
        if (from == k) {
          k = to;
          break;
        }
    return make_unary(k, nnf(f->kids[0], negate));
  }
  case FKind::AU:
  case FKind::EU: {
    if (!negate)
      return make_binary(f->kind, nnf(f->kids[0], false), nnf(f->kids[1], false));
    // !A[a U b] == E[!b U (!a & !b)] | EG !b
    // !E[a U b] == A[!b U (!a & !b)] | AG !b
    const FormulaPtr na = nnf(f->kids[0], true);
    const FormulaPtr nb = nnf(f->kids[1], true);
    const bool universal = f->kind == FKind::AU;
    return make_binary(
        FKind::Or,
        make_binary(universal ? FKind::EU : FKind::AU, nb, make_binary(FKind::And, na, nb)),
        make_unary(universal ? FKind::EG : FKind::AG, nb));
  }
  }
  throw InternalError("unhandled formula kind");
}

} // namespace

FormulaPtr normalize_nnf(const FormulaPtr &f) { return nnf(f, false); }

bool is_nnf(const Formula &f) {
  if (f.kind == FKind::Implies)
    return false;
  if (f.kind == FKind::Not)
    return f.lhs().kind == FKind::Atom;
  return std::all_of(f.kids.begin(), f.kids.end(), [](const FormulaPtr &k) { return is_nnf(*k); });
}

std::vector<std::string> atoms_of(const Formula &f) {
  std::vector<std::string> out;
  auto walk = [&](auto &&self, const Formula &g) -> void {
    if (g.kind == FKind::Atom && std::find(out.begin(), out.end(), g.atom) == out.end())
      out.push_back(g.atom);
    for (const auto &k : g.kids)
      self(self, *k);
  };
  walk(walk, f);
  return out;
}

std::size_t depth(const Formula &f) {
  std::size_t d = 0;
  for (const auto &k : f.kids)
    d = std::max(d, depth(*k));
  return f.kids.empty() ? 0 : d + 1;
}

} // namespace tvar
