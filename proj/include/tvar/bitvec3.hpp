#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

namespace tvar {

using BitMask = std::uint64_t;

inline constexpr unsigned kMaxWidth = 64;

constexpr BitMask width_mask(unsigned width) {
  return width >= 64 ? ~BitMask{0} : ((BitMask{1} << width) - 1);
}

/// A three-valued bit. Unknown concretizes to {0, 1}.
enum class TBit : std::uint8_t { Zero, One, Unknown };

constexpr TBit to_tbit(bool b) { return b ? TBit::One : TBit::Zero; }
char to_char(TBit b);

TBit kleene_not(TBit a);
TBit kleene_and(TBit a, TBit b);
TBit kleene_or(TBit a, TBit b);
TBit kleene_xor(TBit a, TBit b);

/// A concrete bit-vector of the given width.
class CBitVec {
public:
  CBitVec() = default;
  CBitVec(unsigned width, std::uint64_t value);

  unsigned width() const { return width_; }
  std::uint64_t value() const { return value_; }

  friend bool operator==(const CBitVec &, const CBitVec &) = default;

private:
  unsigned width_ = 0;
  std::uint64_t value_ = 0;
};

/// Fixed-width vector of three-valued bits, bit 0 least significant.
///
/// Stored as two masks: `ones` holds the bits known to be 1 and `unknown`
/// the bits that are 'X'. The two never overlap and nothing is set above
/// the width. Width 0 is only used for the empty input vector of systems
/// without inputs.
class TBitVec {
public:
  TBitVec() = default;

  static TBitVec unknown(unsigned width);
  static TBitVec constant(unsigned width, std::uint64_t value);
  static TBitVec from_masks(unsigned width, BitMask ones, BitMask unknown);
  /// Parses MSB-first text over {0,1,X}, optionally wrapped in double quotes.
  static TBitVec parse(std::string_view text);

  explicit TBitVec(const CBitVec &c) : TBitVec(constant(c.width(), c.value())) {}

  unsigned width() const { return width_; }
  BitMask ones() const { return ones_; }
  BitMask unknown_mask() const { return unknown_; }
  BitMask zeros() const { return ~(ones_ | unknown_) & width_mask(width_); }

  TBit bit(unsigned k) const;
  TBitVec with_bit(unsigned k, TBit value) const;

  bool is_concrete() const { return unknown_ == 0; }
  unsigned unknown_count() const { return static_cast<unsigned>(std::popcount(unknown_)); }
  /// Value of a concrete vector; throws ContractViolation otherwise.
  std::uint64_t concrete_value() const;

  /// MSB-first rendering, e.g. "0X1".
  std::string str() const;
  /// Same, wrapped in double quotes.
  std::string quoted() const { return '"' + str() + '"'; }

  friend bool operator==(const TBitVec &, const TBitVec &) = default;

private:
  TBitVec(unsigned width, BitMask ones, BitMask unknown)
      : width_(width), ones_(ones), unknown_(unknown) {}

  unsigned width_ = 0;
  BitMask ones_ = 0;
  BitMask unknown_ = 0;
};

std::ostream &operator<<(std::ostream &os, const TBitVec &v);

struct TBitVecHash {
  std::size_t operator()(const TBitVec &v) const noexcept {
    std::uint64_t h = v.ones() * 0x9E3779B97F4A7C15ull;
    h ^= (v.unknown_mask() + 0x632BE59BD9B4E019ull) * 0xC2B2AE3D27D4EB4Full;
    h ^= std::uint64_t{v.width()} << 57;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

/// gamma(b) is a subset of gamma(a).
bool covers(const TBitVec &a, const TBitVec &b);
bool gamma_contains(const TBitVec &a, const CBitVec &c);
bool gamma_contains(const TBitVec &a, std::uint64_t value);

struct Bounds {
  std::uint64_t umin;
  std::uint64_t umax;
};
Bounds bounds(const TBitVec &a);

/// Calls `f(value)` for every member of gamma(a), in ascending order.
template <class F> void for_each_concretization(const TBitVec &a, F &&f) {
  const BitMask unk = a.unknown_mask();
  BitMask sub = 0;
  do {
    f(a.ones() | sub);
    sub = (sub - unk) & unk;
  } while (sub != 0);
}

TBitVec bit_not(const TBitVec &a);

enum class BitwiseOp { And, Or, Xor };
TBitVec bitwise(BitwiseOp op, const TBitVec &a, const TBitVec &b);
inline TBitVec bit_and(const TBitVec &a, const TBitVec &b) { return bitwise(BitwiseOp::And, a, b); }
inline TBitVec bit_or(const TBitVec &a, const TBitVec &b) { return bitwise(BitwiseOp::Or, a, b); }
inline TBitVec bit_xor(const TBitVec &a, const TBitVec &b) { return bitwise(BitwiseOp::Xor, a, b); }

enum class ArithOp { Add, Sub };
/// Modular addition / subtraction via a ripple-carry Kleene full adder.
TBitVec arith(ArithOp op, const TBitVec &a, const TBitVec &b);
inline TBitVec add(const TBitVec &a, const TBitVec &b) { return arith(ArithOp::Add, a, b); }
inline TBitVec sub(const TBitVec &a, const TBitVec &b) { return arith(ArithOp::Sub, a, b); }

enum class CompareOp { Eq, Ne, Ult, Ule };
TBit compare(CompareOp op, const TBitVec &a, const TBitVec &b);

TBitVec shl(const TBitVec &a, unsigned amount);
TBitVec lshr(const TBitVec &a, unsigned amount);
/// Bits lo..hi inclusive.
TBitVec slice(const TBitVec &a, unsigned lo, unsigned hi);
/// `high` occupies the most significant bits of the result.
TBitVec concat(const TBitVec &high, const TBitVec &low);
TBitVec zext(const TBitVec &a, unsigned width);

TBitVec ite(TBit cond, const TBitVec &a, const TBitVec &b);
/// Least upper bound in the covers order.
TBitVec join(const TBitVec &a, const TBitVec &b);

} // namespace tvar
