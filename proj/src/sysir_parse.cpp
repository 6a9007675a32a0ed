#include "tvar/errors.hpp"
#include "tvar/sysir.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace tvar {

std::string_view to_string(ExprKind kind) {
  switch (kind) {
  case ExprKind::Const:
    return "const";
  case ExprKind::StateRef:
    return "state";
  case ExprKind::InputRef:
    return "input";
  case ExprKind::Not:
    return "not";
  case ExprKind::And:
    return "and";
  case ExprKind::Or:
    return "or";
  case ExprKind::Xor:
    return "xor";
  case ExprKind::Add:
    return "add";
  case ExprKind::Sub:
    return "sub";
  case ExprKind::Eq:
    return "eq";
  case ExprKind::Ne:
    return "ne";
  case ExprKind::Ult:
    return "ult";
  case ExprKind::Ule:
    return "ule";
  case ExprKind::Shl:
    return "shl";
  case ExprKind::Lshr:
    return "lshr";
  case ExprKind::Slice:
    return "slice";
  case ExprKind::Concat:
    return "concat";
  case ExprKind::Zext:
    return "zext";
  case ExprKind::Ite:
    return "ite";
  }
  return "?";
}

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::uint64_t value = 0;
  SourceLoc loc;
};

class LineLexer {
public:
  LineLexer(std::string_view line, std::size_t line_no)
      : line_(line), line_no_(line_no) {}

  Token next() {
    while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_])))
      ++pos_;
    Token t;
    t.loc = {line_no_, pos_ + 1};
    if (pos_ >= line_.size() || line_[pos_] == '#') {
      t.kind = Tok::End;
      return t;
    }
    const char c = line_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < line_.size() &&
             (std::isalnum(static_cast<unsigned char>(line_[pos_])) || line_[pos_] == '_'))
        ++pos_;
      t.kind = Tok::Ident;
      t.text = std::string(line_.substr(start, pos_ - start));
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      unsigned base = 10;
      if (c == '0' && pos_ + 1 < line_.size() && (line_[pos_ + 1] == 'x' || line_[pos_ + 1] == 'b')) {
        base = line_[pos_ + 1] == 'x' ? 16 : 2;
        pos_ += 2;
      }
      std::size_t digits_start = pos_;
      std::uint64_t value = 0;
      while (pos_ < line_.size() && std::isalnum(static_cast<unsigned char>(line_[pos_]))) {
        const char d = static_cast<char>(std::tolower(static_cast<unsigned char>(line_[pos_])));
        unsigned digit;
        if (d >= '0' && d <= '9')
          digit = static_cast<unsigned>(d - '0');
        else if (d >= 'a' && d <= 'f')
          digit = static_cast<unsigned>(d - 'a' + 10);
        else
          digit = 99;
        if (digit >= base)
          throw ParseError(line_no_, pos_ + 1, "invalid digit in numeric literal");
        if (value > (~std::uint64_t{0} - digit) / base)
          throw ParseError(line_no_, start + 1, "numeric literal too large");
        value = value * base + digit;
        ++pos_;
      }
      if (pos_ == digits_start)
        throw ParseError(line_no_, start + 1, "numeric literal has no digits");
      t.kind = Tok::Number;
      t.value = value;
      t.text = std::string(line_.substr(start, pos_ - start));
      return t;
    }
    if (std::string_view("()[],:=").find(c) != std::string_view::npos) {
      ++pos_;
      t.kind = Tok::Punct;
      t.text = std::string(1, c);
      return t;
    }
    throw ParseError(line_no_, pos_ + 1, std::string("unexpected character '") + c + "'");
  }

private:
  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

/// Untyped expression syntax tree; widths are assigned while lowering.
struct PExpr {
  enum Kind { Ident, Number, Call } kind = Number;
  std::string name;
  std::uint64_t value = 0;
  std::vector<PExpr> args;
  SourceLoc loc;
};

class TokenStream {
public:
  TokenStream(std::string_view line, std::size_t line_no) : lexer_(line, line_no) {
    cur_ = lexer_.next();
  }

  const Token &peek() const { return cur_; }
  Token take() {
    Token t = cur_;
    cur_ = lexer_.next();
    return t;
  }

  Token expect_ident(const char *what) {
    if (cur_.kind != Tok::Ident)
      fail(std::string("expected ") + what);
    return take();
  }
  Token expect_number(const char *what) {
    if (cur_.kind != Tok::Number)
      fail(std::string("expected ") + what);
    return take();
  }
  void expect_punct(char c) {
    if (cur_.kind != Tok::Punct || cur_.text[0] != c)
      fail(std::string("expected '") + c + "'");
    take();
  }
  void expect_keyword(const char *kw) {
    if (cur_.kind != Tok::Ident || cur_.text != kw)
      fail(std::string("expected '") + kw + "'");
    take();
  }
  bool at_punct(char c) const { return cur_.kind == Tok::Punct && cur_.text[0] == c; }
  void expect_end() {
    if (cur_.kind != Tok::End)
      fail("unexpected '" + cur_.text + "' at end of declaration");
  }

  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError(cur_.loc.line, cur_.loc.column, msg);
  }

  PExpr parse_expr() {
    PExpr e;
    e.loc = cur_.loc;
    if (cur_.kind == Tok::Number) {
      e.kind = PExpr::Number;
      e.value = take().value;
      return e;
    }
    if (cur_.kind != Tok::Ident)
      fail("expected expression");
    e.name = take().text;
    if (!at_punct('(')) {
      e.kind = PExpr::Ident;
      return e;
    }
    e.kind = PExpr::Call;
    take();
    if (!at_punct(')')) {
      for (;;) {
        e.args.push_back(parse_expr());
        if (at_punct(','))
          take();
        else
          break;
      }
    }
    expect_punct(')');
    return e;
  }

private:
  LineLexer lexer_;
  Token cur_;
};

struct PendingDef {
  std::string target;
  PExpr expr;
  SourceLoc loc;
};

unsigned parse_width(TokenStream &ts) {
  ts.expect_keyword("bv");
  ts.expect_punct('[');
  const Token w = ts.expect_number("width");
  if (w.value == 0 || w.value > kMaxWidth)
    throw ParseError(w.loc.line, w.loc.column,
                     "width must be between 1 and " + std::to_string(kMaxWidth));
  ts.expect_punct(']');
  return static_cast<unsigned>(w.value);
}

const std::map<std::string, ExprKind, std::less<>> &call_kinds() {
  static const std::map<std::string, ExprKind, std::less<>> kinds = {
      {"not", ExprKind::Not},     {"and", ExprKind::And},       {"or", ExprKind::Or},
      {"xor", ExprKind::Xor},     {"add", ExprKind::Add},       {"sub", ExprKind::Sub},
      {"eq", ExprKind::Eq},       {"ne", ExprKind::Ne},         {"ult", ExprKind::Ult},
      {"ule", ExprKind::Ule},     {"shl", ExprKind::Shl},       {"lshr", ExprKind::Lshr},
      {"slice", ExprKind::Slice}, {"concat", ExprKind::Concat}, {"zext", ExprKind::Zext},
      {"ite", ExprKind::Ite},
  };
  return kinds;
}

bool is_reserved(std::string_view name) {
  static const char *const words[] = {"system", "input", "state", "next", "label", "bv", "init"};
  if (std::find(std::begin(words), std::end(words), name) != std::end(words))
    return true;
  return call_kinds().find(name) != call_kinds().end();
}

} // namespace

class SystemParser {
public:
  SystemIR parse(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos)
        end = text.size();
      std::string_view line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r')
        line.remove_suffix(1);
      lines.push_back(line);
      start = end + 1;
    }

    bool have_system = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      TokenStream ts(lines[i], i + 1);
      if (ts.peek().kind == Tok::End)
        continue;
      if (!have_system) {
        if (ts.peek().kind != Tok::Ident || ts.peek().text != "system")
          ts.fail("expected 'system'");
        ts.take();
        ir_.name_ = ts.expect_ident("system name").text;
        ts.expect_end();
        have_system = true;
        continue;
      }
      parse_declaration(ts);
    }
    if (!have_system)
      throw ParseError(lines.size(), 1, "expected 'system'");
    finish();
    return std::move(ir_);
  }

private:
  void declare(const Token &name) {
    if (is_reserved(name.text))
      throw ParseError(name.loc.line, name.loc.column,
                       "'" + name.text + "' is a reserved word");
    if (!names_.insert({name.text, name.loc}).second)
      throw ParseError(name.loc.line, name.loc.column,
                       "duplicate declaration of '" + name.text + "'");
  }

  void parse_declaration(TokenStream &ts) {
    const Token kw = ts.expect_ident("declaration");
    if (kw.text == "input" || kw.text == "state") {
      const Token name = ts.expect_ident("variable name");
      declare(name);
      ts.expect_punct(':');
      VarDecl d;
      d.name = name.text;
      d.width = parse_width(ts);
      d.loc = name.loc;
      if (kw.text == "state") {
        if (ts.peek().kind == Tok::Ident && ts.peek().text == "init") {
          ts.take();
          const Token v = ts.expect_number("initial value");
          if ((v.value & ~width_mask(d.width)) != 0)
            throw ParseError(v.loc.line, v.loc.column,
                             "initial value does not fit in " + std::to_string(d.width) + " bits");
          d.init = v.value;
        }
        ir_.states_.push_back(d);
      } else {
        ir_.inputs_.push_back(d);
      }
      ts.expect_end();
    } else if (kw.text == "next" || kw.text == "label") {
      const Token name = ts.expect_ident(kw.text == "next" ? "state variable name" : "label name");
      ts.expect_punct('=');
      PendingDef def{name.text, ts.parse_expr(), name.loc};
      ts.expect_end();
      if (kw.text == "next") {
        nexts_.push_back(std::move(def));
      } else {
        declare(name);
        labels_.push_back(std::move(def));
      }
    } else if (kw.text == "system") {
      throw ParseError(kw.loc.line, kw.loc.column, "duplicate 'system' declaration");
    } else {
      throw ParseError(kw.loc.line, kw.loc.column,
                       "unknown declaration '" + kw.text + "'");
    }
  }

  void finish() {
    unsigned offset = 0;
    for (auto &s : ir_.states_) {
      s.offset = offset;
      offset += s.width;
      if (offset > kMaxWidth)
        throw ParseError(s.loc.line, s.loc.column,
                         "flattened state width exceeds " + std::to_string(kMaxWidth));
      ir_.init_ |= s.init << s.offset;
    }
    ir_.state_width_ = offset;
    offset = 0;
    for (auto &in : ir_.inputs_) {
      in.offset = offset;
      offset += in.width;
      if (offset > kMaxWidth)
        throw ParseError(in.loc.line, in.loc.column,
                         "flattened input width exceeds " + std::to_string(kMaxWidth));
    }
    ir_.input_width_ = offset;
    if (ir_.states_.empty())
      throw ParseError(1, 1, "system declares no state variables");

    ir_.next_.assign(ir_.states_.size(), ExprId(-1));
    std::vector<SourceLoc> next_loc(ir_.states_.size());
    for (const auto &def : nexts_) {
      auto idx = ir_.find_state(def.target);
      if (!idx)
        throw ParseError(def.loc.line, def.loc.column,
                         "'" + def.target + "' is not a declared state variable");
      if (ir_.next_[*idx] != ExprId(-1))
        throw ParseError(def.loc.line, def.loc.column,
                         "duplicate next expression for '" + def.target + "'");
      allow_inputs_ = true;
      ir_.next_[*idx] = lower(def.expr, ir_.states_[*idx].width);
    }
    for (std::size_t i = 0; i < ir_.states_.size(); ++i)
      if (ir_.next_[i] == ExprId(-1))
        throw ParseError(ir_.states_[i].loc.line, ir_.states_[i].loc.column,
                         "state '" + ir_.states_[i].name + "' has no next expression");
    for (const auto &def : labels_) {
      allow_inputs_ = false;
      ir_.labels_.push_back({def.target, lower(def.expr, 1), def.loc});
    }

    ir_.step_plan_ = plan(ir_.next_);
    std::vector<ExprId> label_roots;
    for (const auto &l : ir_.labels_)
      label_roots.push_back(l.expr);
    ir_.label_plan_ = plan(label_roots);
  }

  std::vector<ExprId> plan(const std::vector<ExprId> &roots) const {
    std::vector<bool> used(ir_.nodes_.size(), false);
    for (ExprId r : roots)
      used[r] = true;
    for (std::size_t i = ir_.nodes_.size(); i-- > 0;) {
      if (!used[i])
        continue;
      const auto &n = ir_.nodes_[i];
      for (unsigned k = 0; k < n.operand_count; ++k)
        used[n.operands[k]] = true;
    }
    std::vector<ExprId> out;
    for (std::size_t i = 0; i < used.size(); ++i)
      if (used[i])
        out.push_back(static_cast<ExprId>(i));
    return out;
  }

  [[noreturn]] static void fail(const SourceLoc &loc, const std::string &msg) {
    throw ParseError(loc.line, loc.column, msg);
  }

  static void check_width(const PExpr &e, unsigned got, std::optional<unsigned> expected) {
    if (expected && *expected != got)
      fail(e.loc, "width mismatch: expected " + std::to_string(*expected) + " bits, got " +
                      std::to_string(got));
  }

  ExprId intern(ExprNode n) {
    auto key = std::make_tuple(n.kind, n.width, n.operands[0], n.operands[1], n.operands[2],
                               n.operand_count, n.value, n.var, n.lo, n.hi);
    auto it = interned_.find(key);
    if (it != interned_.end())
      return it->second;
    const auto id = static_cast<ExprId>(ir_.nodes_.size());
    ir_.nodes_.push_back(n);
    interned_.emplace(key, id);
    return id;
  }

  unsigned width_of(ExprId id) const { return ir_.nodes_[id].width; }

  std::uint64_t constant_arg(const PExpr &e, const char *what) const {
    if (e.kind != PExpr::Number)
      fail(e.loc, std::string("expected a numeric constant for ") + what);
    return e.value;
  }

  void arity(const PExpr &e, std::size_t n) const {
    if (e.args.size() != n)
      fail(e.loc, "'" + e.name + "' expects " + std::to_string(n) + " argument" +
                      (n == 1 ? "" : "s") + ", got " + std::to_string(e.args.size()));
  }

  /// Lowers two operands that must share a width, inferring literal widths
  /// from the other operand or from the expected width.
  std::pair<ExprId, ExprId> lower_pair(const PExpr &a, const PExpr &b,
                                       std::optional<unsigned> expected) {
    if (a.kind != PExpr::Number) {
      ExprId x = lower(a, expected);
      return {x, lower(b, width_of(x))};
    }
    if (b.kind != PExpr::Number) {
      ExprId y = lower(b, expected);
      return {lower(a, width_of(y)), y};
    }
    if (!expected)
      fail(a.loc, "cannot infer the width of a literal here");
    return {lower(a, expected), lower(b, expected)};
  }

  ExprId lower(const PExpr &e, std::optional<unsigned> expected) {
    ExprNode n;
    switch (e.kind) {
    case PExpr::Number: {
      if (!expected)
        fail(e.loc, "cannot infer the width of a literal here");
      if ((e.value & ~width_mask(*expected)) != 0)
        fail(e.loc, "literal " + std::to_string(e.value) + " does not fit in " +
                        std::to_string(*expected) + " bits");
      n.kind = ExprKind::Const;
      n.width = *expected;
      n.value = e.value;
      return intern(n);
    }
    case PExpr::Ident: {
      if (auto s = ir_.find_state(e.name)) {
        n.kind = ExprKind::StateRef;
        n.var = static_cast<unsigned>(*s);
        n.width = ir_.states_[*s].width;
      } else if (auto in = ir_.find_input(e.name)) {
        if (!allow_inputs_)
          fail(e.loc, "labels may only refer to state variables, not input '" + e.name + "'");
        n.kind = ExprKind::InputRef;
        n.var = static_cast<unsigned>(*in);
        n.width = ir_.inputs_[*in].width;
      } else {
        fail(e.loc, "undeclared variable '" + e.name + "'");
      }
      check_width(e, n.width, expected);
      return intern(n);
    }
    case PExpr::Call:
      break;
    }

    auto it = call_kinds().find(e.name);
    if (it == call_kinds().end())
      fail(e.loc, "unknown operator '" + e.name + "'");
    n.kind = it->second;
    switch (n.kind) {
    case ExprKind::Not: {
      arity(e, 1);
      n.operands[0] = lower(e.args[0], expected);
      n.operand_count = 1;
      n.width = width_of(n.operands[0]);
      break;
    }
    case ExprKind::And:
    case ExprKind::Or:
    case ExprKind::Xor:
    case ExprKind::Add:
    case ExprKind::Sub: {
      arity(e, 2);
      auto [a, b] = lower_pair(e.args[0], e.args[1], expected);
      n.operands = {a, b, 0};
      n.operand_count = 2;
      n.width = width_of(a);
      break;
    }
    case ExprKind::Eq:
    case ExprKind::Ne:
    case ExprKind::Ult:
    case ExprKind::Ule: {
      arity(e, 2);
      auto [a, b] = lower_pair(e.args[0], e.args[1], std::nullopt);
      n.operands = {a, b, 0};
      n.operand_count = 2;
      n.width = 1;
      break;
    }
    case ExprKind::Shl:
    case ExprKind::Lshr: {
      arity(e, 2);
      const std::uint64_t k = constant_arg(e.args[1], "the shift amount");
      n.operands[0] = lower(e.args[0], expected);
      n.operand_count = 1;
      n.width = width_of(n.operands[0]);
      if (k > n.width)
        fail(e.args[1].loc, "shift amount " + std::to_string(k) + " exceeds width " +
                                std::to_string(n.width));
      n.lo = static_cast<unsigned>(k);
      break;
    }
    case ExprKind::Slice: {
      arity(e, 3);
      const std::uint64_t lo = constant_arg(e.args[1], "the low bit");
      const std::uint64_t hi = constant_arg(e.args[2], "the high bit");
      n.operands[0] = lower(e.args[0], std::nullopt);
      n.operand_count = 1;
      const unsigned w = width_of(n.operands[0]);
      if (lo > hi || hi >= w)
        fail(e.loc, "slice " + std::to_string(lo) + ".." + std::to_string(hi) +
                        " out of range for width " + std::to_string(w));
      n.lo = static_cast<unsigned>(lo);
      n.hi = static_cast<unsigned>(hi);
      n.width = n.hi - n.lo + 1;
      break;
    }
    case ExprKind::Concat: {
      arity(e, 2);
      n.operands = {lower(e.args[0], std::nullopt), lower(e.args[1], std::nullopt), 0};
      n.operand_count = 2;
      n.width = width_of(n.operands[0]) + width_of(n.operands[1]);
      if (n.width > kMaxWidth)
        fail(e.loc, "concat result exceeds " + std::to_string(kMaxWidth) + " bits");
      break;
    }
    case ExprKind::Zext: {
      arity(e, 2);
      const std::uint64_t w = constant_arg(e.args[1], "the target width");
      n.operands[0] = lower(e.args[0], std::nullopt);
      n.operand_count = 1;
      if (w < width_of(n.operands[0]) || w > kMaxWidth)
        fail(e.args[1].loc, "zext target width " + std::to_string(w) + " is invalid for a " +
                                std::to_string(width_of(n.operands[0])) + "-bit operand");
      n.width = static_cast<unsigned>(w);
      break;
    }
    case ExprKind::Ite: {
      arity(e, 3);
      const ExprId c = lower(e.args[0], 1u);
      auto [a, b] = lower_pair(e.args[1], e.args[2], expected);
      n.operands = {c, a, b};
      n.operand_count = 3;
      n.width = width_of(a);
      break;
    }
    default:
      throw InternalError("unhandled call kind");
    }
    check_width(e, n.width, expected);
    return intern(n);
  }

  SystemIR ir_;
  std::map<std::string, SourceLoc, std::less<>> names_;
  std::vector<PendingDef> nexts_;
  std::vector<PendingDef> labels_;
  bool allow_inputs_ = true;
  std::map<std::tuple<ExprKind, unsigned, ExprId, ExprId, ExprId, unsigned, std::uint64_t,
                      unsigned, unsigned, unsigned>,
           ExprId>
      interned_;
};

SystemIR parse_system(std::string_view text) { return SystemParser().parse(text); }

SystemIR load_system_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open system file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str());
}

std::optional<std::size_t> SystemIR::find_label(std::string_view name) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i].name == name)
      return i;
  return std::nullopt;
}

std::optional<std::size_t> SystemIR::find_state(std::string_view name) const {
  for (std::size_t i = 0; i < states_.size(); ++i)
    if (states_[i].name == name)
      return i;
  return std::nullopt;
}

std::optional<std::size_t> SystemIR::find_input(std::string_view name) const {
  for (std::size_t i = 0; i < inputs_.size(); ++i)
    if (inputs_[i].name == name)
      return i;
  return std::nullopt;
}

std::size_t SystemIR::state_var_of_bit(unsigned bit) const {
  for (std::size_t i = 0; i < states_.size(); ++i)
    if (bit >= states_[i].offset && bit < states_[i].offset + states_[i].width)
      return i;
  throw ContractViolation("state bit " + std::to_string(bit) + " out of range");
}

std::size_t SystemIR::input_var_of_bit(unsigned bit) const {
  for (std::size_t i = 0; i < inputs_.size(); ++i)
    if (bit >= inputs_[i].offset && bit < inputs_[i].offset + inputs_[i].width)
      return i;
  throw ContractViolation("input bit " + std::to_string(bit) + " out of range");
}

namespace {

void render_expr(const SystemIR &ir, ExprId id, std::ostream &os) {
  const ExprNode &n = ir.node(id);
  switch (n.kind) {
  case ExprKind::Const:
    os << n.value;
    return;
  case ExprKind::StateRef:
    os << ir.states()[n.var].name;
    return;
  case ExprKind::InputRef:
    os << ir.inputs()[n.var].name;
    return;
  default:
    break;
  }
  os << to_string(n.kind) << '(';
  for (unsigned k = 0; k < n.operand_count; ++k) {
    if (k)
      os << ", ";
    render_expr(ir, n.operands[k], os);
  }
  switch (n.kind) {
  case ExprKind::Shl:
  case ExprKind::Lshr:
    os << ", " << n.lo;
    break;
  case ExprKind::Slice:
    os << ", " << n.lo << ", " << n.hi;
    break;
  case ExprKind::Zext:
    os << ", " << n.width;
    break;
  default:
    break;
  }
  os << ')';
}

} // namespace

std::string SystemIR::to_text() const {
  std::ostringstream os;
  os << "system " << name_ << '\n';
  for (const auto &in : inputs_)
    os << "input " << in.name << ": bv[" << in.width << "]\n";
  for (const auto &s : states_)
    os << "state " << s.name << ": bv[" << s.width << "] init " << s.init << '\n';
  for (std::size_t i = 0; i < states_.size(); ++i) {
    os << "next " << states_[i].name << " = ";
    render_expr(*this, next_[i], os);
    os << '\n';
  }
  for (const auto &l : labels_) {
    os << "label " << l.name << " = ";
    render_expr(*this, l.expr, os);
    os << '\n';
  }
  return os.str();
}

} // namespace tvar
