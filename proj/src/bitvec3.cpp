#include "tvar/bitvec3.hpp"

#include "tvar/errors.hpp"

#include <ostream>

namespace tvar {

namespace {

void require_width(unsigned width) {
  if (width > kMaxWidth)
    throw ContractViolation("bit-vector width " + std::to_string(width) +
                            " exceeds " + std::to_string(kMaxWidth));
}

void require_same_width(const TBitVec &a, const TBitVec &b, const char *op) {
  if (a.width() != b.width())
    throw ContractViolation(std::string(op) + ": width mismatch (" +
                            std::to_string(a.width()) + " vs " +
                            std::to_string(b.width()) + ")");
}

} // namespace

char to_char(TBit b) {
  switch (b) {
  case TBit::Zero:
    return '0';
  case TBit::One:
    return '1';
  case TBit::Unknown:
    return 'X';
  }
  return '?';
}

TBit kleene_not(TBit a) {
  if (a == TBit::Unknown)
    return a;
  return a == TBit::One ? TBit::Zero : TBit::One;
}

TBit kleene_and(TBit a, TBit b) {
  if (a == TBit::Zero || b == TBit::Zero)
    return TBit::Zero;
  if (a == TBit::One && b == TBit::One)
    return TBit::One;
  return TBit::Unknown;
}

TBit kleene_or(TBit a, TBit b) {
  if (a == TBit::One || b == TBit::One)
    return TBit::One;
  if (a == TBit::Zero && b == TBit::Zero)
    return TBit::Zero;
  return TBit::Unknown;
}

TBit kleene_xor(TBit a, TBit b) {
  if (a == TBit::Unknown || b == TBit::Unknown)
    return TBit::Unknown;
  return to_tbit(a != b);
}

CBitVec::CBitVec(unsigned width, std::uint64_t value)
    : width_(width), value_(value) {
  require_width(width);
  if ((value & ~width_mask(width)) != 0)
    throw ContractViolation("value " + std::to_string(value) +
                            " does not fit in " + std::to_string(width) +
                            " bits");
}

TBitVec TBitVec::unknown(unsigned width) {
  require_width(width);
  return TBitVec(width, 0, width_mask(width));
}

TBitVec TBitVec::constant(unsigned width, std::uint64_t value) {
  require_width(width);
  return TBitVec(width, value & width_mask(width), 0);
}

TBitVec TBitVec::from_masks(unsigned width, BitMask ones, BitMask unknown) {
  require_width(width);
  const BitMask m = width_mask(width);
  if ((ones & unknown) != 0 || (ones & ~m) != 0 || (unknown & ~m) != 0)
    throw ContractViolation("inconsistent three-valued masks");
  return TBitVec(width, ones, unknown);
}

TBitVec TBitVec::parse(std::string_view text) {
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"')
    text = text.substr(1, text.size() - 2);
  if (text.empty())
    throw ContractViolation("empty three-valued bit-vector literal");
  require_width(static_cast<unsigned>(text.size()));
  const auto width = static_cast<unsigned>(text.size());
  BitMask ones = 0, unknown = 0;
  for (unsigned i = 0; i < width; ++i) {
    const unsigned k = width - 1 - i;
    switch (text[i]) {
    case '0':
      break;
    case '1':
      ones |= BitMask{1} << k;
      break;
    case 'X':
    case 'x':
      unknown |= BitMask{1} << k;
      break;
    default:
      throw ContractViolation("invalid character '" + std::string(1, text[i]) +
                              "' in three-valued bit-vector \"" +
                              std::string(text) + "\"");
    }
  }
  return TBitVec(width, ones, unknown);
}

TBit TBitVec::bit(unsigned k) const {
  if (k >= width_)
    throw ContractViolation("bit index " + std::to_string(k) +
                            " out of range for width " + std::to_string(width_));
  const BitMask m = BitMask{1} << k;
  if (unknown_ & m)
    return TBit::Unknown;
  return to_tbit(ones_ & m);
}

TBitVec TBitVec::with_bit(unsigned k, TBit value) const {
  if (k >= width_)
    throw ContractViolation("bit index " + std::to_string(k) +
                            " out of range for width " + std::to_string(width_));
  const BitMask m = BitMask{1} << k;
  TBitVec r = *this;
  r.ones_ &= ~m;
  r.unknown_ &= ~m;
  if (value == TBit::One)
    r.ones_ |= m;
  else if (value == TBit::Unknown)
    r.unknown_ |= m;
  return r;
}

std::uint64_t TBitVec::concrete_value() const {
  if (!is_concrete())
    throw ContractViolation("\"" + str() + "\" is not concrete");
  return ones_;
}

std::string TBitVec::str() const {
  std::string s(width_, '0');
  for (unsigned k = 0; k < width_; ++k)
    s[width_ - 1 - k] = to_char(bit(k));
  return s;
}

std::ostream &operator<<(std::ostream &os, const TBitVec &v) {
  return os << v.quoted();
}

bool covers(const TBitVec &a, const TBitVec &b) {
  require_same_width(a, b, "covers");
  // Every bit of a is X or equal to the (known) bit of b.
  const BitMask known_a = ~a.unknown_mask() & width_mask(a.width());
  if (b.unknown_mask() & known_a)
    return false;
  return ((a.ones() ^ b.ones()) & known_a) == 0;
}

bool gamma_contains(const TBitVec &a, std::uint64_t value) {
  if ((value & ~width_mask(a.width())) != 0)
    return false;
  const BitMask known = ~a.unknown_mask() & width_mask(a.width());
  return ((a.ones() ^ value) & known) == 0;
}

bool gamma_contains(const TBitVec &a, const CBitVec &c) {
  if (a.width() != c.width())
    throw ContractViolation("gamma_contains: width mismatch");
  return gamma_contains(a, c.value());
}

Bounds bounds(const TBitVec &a) {
  return {a.ones(), a.ones() | a.unknown_mask()};
}

TBitVec bit_not(const TBitVec &a) {
  return TBitVec::from_masks(a.width(), a.zeros(), a.unknown_mask());
}

TBitVec bitwise(BitwiseOp op, const TBitVec &a, const TBitVec &b) {
  require_same_width(a, b, "bitwise");
  const unsigned w = a.width();
  const BitMask m = width_mask(w);
  switch (op) {
  case BitwiseOp::And: {
    const BitMask zeros = a.zeros() | b.zeros();
    const BitMask ones = a.ones() & b.ones();
    return TBitVec::from_masks(w, ones, m & ~zeros & ~ones);
  }
  case BitwiseOp::Or: {
    const BitMask ones = a.ones() | b.ones();
    const BitMask zeros = a.zeros() & b.zeros();
    return TBitVec::from_masks(w, ones, m & ~zeros & ~ones);
  }
  case BitwiseOp::Xor: {
    const BitMask unknown = a.unknown_mask() | b.unknown_mask();
    return TBitVec::from_masks(w, (a.ones() ^ b.ones()) & ~unknown, unknown);
  }
  }
  throw InternalError("unhandled bitwise op");
}

TBitVec arith(ArithOp op, const TBitVec &a, const TBitVec &b) {
  require_same_width(a, b, "arith");
  const TBitVec rhs = op == ArithOp::Sub ? bit_not(b) : b;
  TBit carry = op == ArithOp::Sub ? TBit::One : TBit::Zero;
  BitMask ones = 0, unknown = 0;
  for (unsigned k = 0; k < a.width(); ++k) {
    const TBit x = a.bit(k), y = rhs.bit(k);
    const TBit sum = kleene_xor(kleene_xor(x, y), carry);
    carry = kleene_or(kleene_or(kleene_and(x, y), kleene_and(x, carry)),
                      kleene_and(y, carry));
    if (sum == TBit::One)
      ones |= BitMask{1} << k;
    else if (sum == TBit::Unknown)
      unknown |= BitMask{1} << k;
  }
  return TBitVec::from_masks(a.width(), ones, unknown);
}

TBit compare(CompareOp op, const TBitVec &a, const TBitVec &b) {
  require_same_width(a, b, "compare");
  switch (op) {
  case CompareOp::Eq:
  case CompareOp::Ne: {
    const BitMask known_both =
        ~(a.unknown_mask() | b.unknown_mask()) & width_mask(a.width());
    TBit eq;
    if ((a.ones() ^ b.ones()) & known_both)
      eq = TBit::Zero;
    else if (a.is_concrete() && b.is_concrete())
      eq = TBit::One;
    else
      eq = TBit::Unknown;
    return op == CompareOp::Eq ? eq : kleene_not(eq);
  }
  case CompareOp::Ult: {
    const Bounds x = bounds(a), y = bounds(b);
    if (x.umax < y.umin)
      return TBit::One;
    if (x.umin >= y.umax)
      return TBit::Zero;
    return TBit::Unknown;
  }
  case CompareOp::Ule: {
    const Bounds x = bounds(a), y = bounds(b);
    if (x.umax <= y.umin)
      return TBit::One;
    if (x.umin > y.umax)
      return TBit::Zero;
    return TBit::Unknown;
  }
  }
  throw InternalError("unhandled compare op");
}

TBitVec shl(const TBitVec &a, unsigned amount) {
  if (amount >= a.width())
    return TBitVec::constant(a.width(), 0);
  const BitMask m = width_mask(a.width());
  return TBitVec::from_masks(a.width(), (a.ones() << amount) & m,
                             (a.unknown_mask() << amount) & m);
}

TBitVec lshr(const TBitVec &a, unsigned amount) {
  if (amount >= a.width())
    return TBitVec::constant(a.width(), 0);
  return TBitVec::from_masks(a.width(), a.ones() >> amount,
                             a.unknown_mask() >> amount);
}

TBitVec slice(const TBitVec &a, unsigned lo, unsigned hi) {
  if (lo > hi || hi >= a.width())
    throw ContractViolation("slice " + std::to_string(lo) + ".." +
                            std::to_string(hi) + " out of range for width " +
                            std::to_string(a.width()));
  const unsigned w = hi - lo + 1;
  const BitMask m = width_mask(w);
  return TBitVec::from_masks(w, (a.ones() >> lo) & m,
                             (a.unknown_mask() >> lo) & m);
}

TBitVec concat(const TBitVec &high, const TBitVec &low) {
  const unsigned w = high.width() + low.width();
  require_width(w);
  const unsigned s = low.width();
  const BitMask hi_ones = s >= 64 ? 0 : high.ones() << s;
  const BitMask hi_unk = s >= 64 ? 0 : high.unknown_mask() << s;
  return TBitVec::from_masks(w, hi_ones | low.ones(),
                             hi_unk | low.unknown_mask());
}

TBitVec zext(const TBitVec &a, unsigned width) {
  if (width < a.width())
    throw ContractViolation("zext target width " + std::to_string(width) +
                            " is smaller than source width " +
                            std::to_string(a.width()));
  require_width(width);
  return TBitVec::from_masks(width, a.ones(), a.unknown_mask());
}

TBitVec join(const TBitVec &a, const TBitVec &b) {
  require_same_width(a, b, "join");
  const BitMask unknown =
      a.unknown_mask() | b.unknown_mask() | (a.ones() ^ b.ones());
  return TBitVec::from_masks(a.width(), a.ones() & b.ones() & ~unknown,
                             unknown);
}

TBitVec ite(TBit cond, const TBitVec &a, const TBitVec &b) {
  require_same_width(a, b, "ite");
  switch (cond) {
  case TBit::One:
    return a;
  case TBit::Zero:
    return b;
  case TBit::Unknown:
    return join(a, b);
  }
  throw InternalError("unhandled TBit");
}

} // namespace tvar
