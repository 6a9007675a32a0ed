#include "support.hpp"

#include <sstream>

#ifndef TVAR_SYSTEMS_DIR
#error "TVAR_SYSTEMS_DIR must point at the systems directory"
#endif

namespace tvar::test {

std::shared_ptr<const SystemIR> landing_gear() {
  static const auto ir =
      std::make_shared<const SystemIR>(generate_benchmark(BenchmarkKind::LandingGear));
  return ir;
}

std::shared_ptr<const SystemIR> load_corpus(const std::string &file) {
  return std::make_shared<const SystemIR>(
      load_system_file(std::string(TVAR_SYSTEMS_DIR) + "/" + file));
}

const std::vector<CorpusEntry> &corpus() {
  static const std::vector<CorpusEntry> entries = {
      {"landing_gear.msys", {"EF(AG(msb))", "AG(EF(!msb))", "AG(msb -> EX(msb))"}},
      {"recoverable_2_1_1.msys", {"AG(EF(v_zero))", "EF(!v_zero)", "AG(v_zero)"}},
      {"nonrecoverable_2_1_1.msys", {"AG(EF(v_zero))", "EF(AG(!v_zero))"}},
      {"shift_register.msys",
       {"AG(full -> AX(saw_full))", "EF(full)", "AG(EF(!top))", "E[!full U top]"}},
      {"accumulator.msys", {"AG(EF(!big))", "AG(big -> AX(!big))", "EF(big & odd)"}},
      {"arbiter.msys", {"AG(!both)", "AG(EF(idle))", "A[idle U (g0 | g1)]"}},
  };
  return entries;
}

namespace {

struct Var {
  std::string name;
  unsigned width;
};

class SystemGen {
public:
  SystemGen(std::mt19937_64 &rng, std::vector<Var> vars) : rng_(rng), vars_(std::move(vars)) {}

  /// Expression of width `w`. Literals are only produced when `literal_ok`,
  /// i.e. when the parser can infer their width from context. `is_literal`
  /// reports whether the result is a bare number.
  std::string expr(unsigned w, unsigned depth, bool literal_ok, bool *is_literal = nullptr) {
    if (is_literal)
      *is_literal = false;
    const int choice = depth == 0 ? pick(0, 1) : pick(0, 13);
    switch (choice) {
    case 0:
      if (literal_ok) {
        if (is_literal)
          *is_literal = true;
        return std::to_string(std::uniform_int_distribution<std::uint64_t>(
            0, width_mask(w))(rng_));
      }
      [[fallthrough]];
    case 1:
      return var_of_width(w);
    case 2:
      return "not(" + expr(w, depth - 1, literal_ok) + ")";
    case 3:
    case 4:
    case 5: {
      static const char *ops[] = {"and", "or", "xor"};
      return binary(ops[choice - 3], w, depth, literal_ok);
    }
    case 6:
    case 7:
      return binary(choice == 6 ? "add" : "sub", w, depth, literal_ok);
    case 8: {
      const std::string c = condition(depth - 1);
      bool lit = false;
      std::string a = expr(w, depth - 1, literal_ok, &lit);
      return "ite(" + c + ", " + a + ", " + expr(w, depth - 1, literal_ok || !lit) + ")";
    }
    case 9: {
      const unsigned k = static_cast<unsigned>(pick(0, static_cast<int>(w)));
      return std::string(pick(0, 1) ? "shl(" : "lshr(") + expr(w, depth - 1, false) + ", " +
             std::to_string(k) + ")";
    }
    case 10: {
      const unsigned src = w + static_cast<unsigned>(pick(0, 2));
      if (src > 8)
        return var_of_width(w);
      const unsigned lo = static_cast<unsigned>(pick(0, static_cast<int>(src - w)));
      return "slice(" + expr(src, depth - 1, false) + ", " + std::to_string(lo) + ", " +
             std::to_string(lo + w - 1) + ")";
    }
    case 11: {
      if (w < 2)
        return condition(depth - 1);
      const unsigned hi = static_cast<unsigned>(pick(1, static_cast<int>(w - 1)));
      return "concat(" + expr(hi, depth - 1, false) + ", " + expr(w - hi, depth - 1, false) +
             ")";
    }
    case 12: {
      const unsigned src = static_cast<unsigned>(pick(1, static_cast<int>(w)));
      return "zext(" + expr(src, depth - 1, false) + ", " + std::to_string(w) + ")";
    }
    default:
      return w == 1 ? condition(depth - 1) : var_of_width(w);
    }
  }

  std::string condition(unsigned depth) {
    static const char *ops[] = {"eq", "ne", "ult", "ule"};
    const unsigned w = static_cast<unsigned>(pick(1, 4));
    std::string a = expr(w, depth, false);
    const std::string b = expr(w, depth, true);
    return std::string(ops[pick(0, 3)]) + "(" + a + ", " + b + ")";
  }

private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::string binary(const std::string &op, unsigned w, unsigned depth, bool literal_ok) {
    bool lit = false;
    std::string a = expr(w, depth - 1, literal_ok, &lit);
    std::string b = expr(w, depth - 1, literal_ok || !lit);
    return op + "(" + a + ", " + b + ")";
  }

  /// A variable reference adjusted to width `w` by slicing or extending.
  std::string var_of_width(unsigned w) {
    const Var &v = vars_[static_cast<std::size_t>(pick(0, static_cast<int>(vars_.size()) - 1))];
    if (v.width == w)
      return v.name;
    if (v.width > w) {
      const unsigned lo = static_cast<unsigned>(pick(0, static_cast<int>(v.width - w)));
      return "slice(" + v.name + ", " + std::to_string(lo) + ", " + std::to_string(lo + w - 1) +
             ")";
    }
    return "zext(" + v.name + ", " + std::to_string(w) + ")";
  }

  std::mt19937_64 &rng_;
  std::vector<Var> vars_;
};

std::vector<unsigned> partition(std::mt19937_64 &rng, unsigned total, unsigned max_parts) {
  std::vector<unsigned> parts;
  while (total > 0) {
    const unsigned w = parts.size() + 1 == max_parts
                           ? total
                           : std::uniform_int_distribution<unsigned>(1, total)(rng);
    parts.push_back(w);
    total -= w;
  }
  return parts;
}

} // namespace

std::string random_system_text(std::mt19937_64 &rng, unsigned max_state_bits,
                               unsigned max_input_bits) {
  const unsigned w = std::uniform_int_distribution<unsigned>(1, max_state_bits)(rng);
  const unsigned y = std::uniform_int_distribution<unsigned>(0, max_input_bits)(rng);
  std::vector<Var> states, inputs, all;
  for (unsigned width : partition(rng, w, 3))
    states.push_back({"s" + std::to_string(states.size()), width});
  for (unsigned width : partition(rng, y, 2))
    inputs.push_back({"i" + std::to_string(inputs.size()), width});
  all = states;
  all.insert(all.end(), inputs.begin(), inputs.end());

  std::ostringstream os;
  os << "system random\n";
  for (const auto &v : inputs)
    os << "input " << v.name << ": bv[" << v.width << "]\n";
  for (const auto &v : states)
    os << "state " << v.name << ": bv[" << v.width << "] init "
       << std::uniform_int_distribution<std::uint64_t>(0, width_mask(v.width))(rng) << '\n';
  SystemGen next_gen(rng, all);
  for (const auto &v : states)
    os << "next " << v.name << " = "
       << next_gen.expr(v.width, std::uniform_int_distribution<unsigned>(1, 3)(rng), true)
       << '\n';
  SystemGen label_gen(rng, states);
  const unsigned labels = std::uniform_int_distribution<unsigned>(1, 3)(rng);
  for (unsigned l = 0; l < labels; ++l)
    os << "label p" << l << " = "
       << label_gen.condition(std::uniform_int_distribution<unsigned>(0, 2)(rng)) << '\n';
  return os.str();
}

FormulaPtr random_formula(std::mt19937_64 &rng, const std::vector<std::string> &atoms,
                          unsigned max_depth) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  if (max_depth == 0 || pick(0, 5) == 0) {
    if (pick(0, 12) == 0)
      return make_const(pick(0, 1) == 1);
    return make_atom(atoms[static_cast<std::size_t>(pick(0, static_cast<int>(atoms.size()) - 1))]);
  }
  static const FKind unary[] = {FKind::Not, FKind::AX, FKind::EX, FKind::AF,
                                FKind::EF,  FKind::AG, FKind::EG};
  static const FKind binary[] = {FKind::And, FKind::Or, FKind::Implies, FKind::AU, FKind::EU};
  if (pick(0, 1) == 0)
    return make_unary(unary[pick(0, 6)], random_formula(rng, atoms, max_depth - 1));
  auto a = random_formula(rng, atoms, max_depth - 1);
  return make_binary(binary[pick(0, 4)], a, random_formula(rng, atoms, max_depth - 1));
}

std::vector<std::string> label_names(const SystemIR &ir) {
  std::vector<std::string> out;
  for (const auto &l : ir.labels())
    out.push_back(l.name);
  return out;
}

std::set<std::string> state_strings(const PKS &pks) {
  std::set<std::string> out;
  for (const auto &s : pks.states)
    out.insert(s.str());
  return out;
}

std::set<std::pair<std::string, std::string>> edge_strings(const PKS &pks) {
  std::set<std::pair<std::string, std::string>> out;
  for (std::size_t s = 0; s < pks.states.size(); ++s)
    for (const auto &e : pks.edges[s])
      out.insert({pks.states[s].str(), pks.states[e.to].str()});
  return out;
}

TBitVec abstraction_of(const std::vector<std::uint64_t> &values, unsigned width) {
  BitMask ones = 0, unknown = 0;
  for (unsigned k = 0; k < width; ++k) {
    bool saw0 = false, saw1 = false;
    for (std::uint64_t v : values)
      (v >> k & 1 ? saw1 : saw0) = true;
    if (saw0 && saw1)
      unknown |= BitMask{1} << k;
    else if (saw1)
      ones |= BitMask{1} << k;
  }
  return TBitVec::from_masks(width, ones, unknown);
}

std::vector<TBitVec> all_vectors(unsigned width) {
  std::vector<TBitVec> out;
  std::size_t total = 1;
  for (unsigned k = 0; k < width; ++k)
    total *= 3;
  for (std::size_t n = 0; n < total; ++n) {
    BitMask ones = 0, unknown = 0;
    std::size_t x = n;
    for (unsigned k = 0; k < width; ++k, x /= 3) {
      if (x % 3 == 1)
        ones |= BitMask{1} << k;
      else if (x % 3 == 2)
        unknown |= BitMask{1} << k;
    }
    out.push_back(TBitVec::from_masks(width, ones, unknown));
  }
  return out;
}

} // namespace tvar::test
