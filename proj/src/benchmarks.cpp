#include "tvar/errors.hpp"
#include "tvar/sysir.hpp"

#include <sstream>

namespace tvar {

std::string_view to_string(BenchmarkKind kind) {
  switch (kind) {
  case BenchmarkKind::Recoverable:
    return "recoverable";
  case BenchmarkKind::NonRecoverable:
    return "nonrecoverable";
  case BenchmarkKind::LandingGear:
    return "landing-gear";
  }
  return "?";
}

std::optional<BenchmarkKind> parse_benchmark_kind(std::string_view text) {
  for (auto k : {BenchmarkKind::Recoverable, BenchmarkKind::NonRecoverable,
                 BenchmarkKind::LandingGear})
    if (to_string(k) == text)
      return k;
  return std::nullopt;
}

std::string benchmark_text(BenchmarkKind kind, unsigned v, unsigned u, unsigned c) {
  if (kind == BenchmarkKind::LandingGear) {
    return "system landing_gear\n"
           "input lever: bv[1]\n"
           "state s0: bv[1] init 0\n"
           "state s1: bv[1] init 0\n"
           "state s2: bv[1] init 0\n"
           "next s2 = ite(and(s1, not(s0)), lever, or(s2, and(s1, s0)))\n"
           "next s1 = ite(s2, and(s1, not(s0)), or(or(s1, s0), lever))\n"
           "next s0 = ite(s1, and(s0, or(not(s2), lever)), xor(not(s0), and(s0, s2)))\n"
           "label msb = s2\n";
  }
  if (v == 0 || u == 0 || c == 0)
    throw ContractViolation("benchmark parameters V, U, C must be at least 1");
  if (v + u + c > kMaxWidth || v + u + 1 > kMaxWidth)
    throw ContractViolation("benchmark parameters exceed the supported width");
  const bool recoverable = kind == BenchmarkKind::Recoverable;
  std::ostringstream os;
  os << "system " << to_string(kind) << '\n'
     << "input n: bv[" << v << "]\n"
     << "input z: bv[" << u << "]\n"
     << "input r: bv[1]\n"
     << "state v: bv[" << v << "] init 0\n"
     << "state u: bv[" << u << "] init 0\n"
     << "state c: bv[" << c << "] init 0\n";
  if (recoverable)
    os << "next v = ite(eq(r, 1), 0, ite(ule(n, v), v, n))\n";
  else
    os << "next v = ite(ule(n, v), v, n)\n";
  os << "next u = z\n"
     << "next c = add(c, 1)\n"
     << "label v_zero = eq(v, 0)\n";
  return os.str();
}

SystemIR generate_benchmark(BenchmarkKind kind, unsigned v, unsigned u, unsigned c) {
  return parse_system(benchmark_text(kind, v, u, c));
}

} // namespace tvar
