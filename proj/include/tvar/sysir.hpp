#pragma once

#include "tvar/bitvec3.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tvar {

enum class ExprKind : std::uint8_t {
  Const,
  StateRef,
  InputRef,
  Not,
  And,
  Or,
  Xor,
  Add,
  Sub,
  Eq,
  Ne,
  Ult,
  Ule,
  Shl,
  Lshr,
  Slice,
  Concat,
  Zext,
  Ite,
};

std::string_view to_string(ExprKind kind);

using ExprId = std::uint32_t;

/// One node of the expression DAG. Operands always have smaller ids than the
/// node itself, so ascending id order is a topological order.
struct ExprNode {
  ExprKind kind = ExprKind::Const;
  unsigned width = 0;
  std::array<ExprId, 3> operands{};
  unsigned operand_count = 0;
  std::uint64_t value = 0; // Const payload
  unsigned var = 0;        // StateRef / InputRef: index into states() / inputs()
  unsigned lo = 0;         // Slice low bit, Shl/Lshr amount
  unsigned hi = 0;         // Slice high bit
};

struct SourceLoc {
  std::size_t line = 0;
  std::size_t column = 0;
};

struct VarDecl {
  std::string name;
  unsigned width = 0;
  /// Position of bit 0 of this variable in the flattened vector.
  unsigned offset = 0;
  /// Initial value (state variables only).
  std::uint64_t init = 0;
  SourceLoc loc;
};

struct LabelDecl {
  std::string name;
  ExprId expr = 0;
  SourceLoc loc;
};

/// A parsed, validated finite-state machine.
///
/// State and input variables are flattened in declaration order, LSB-first
/// within each variable; the first declared variable occupies bit 0.
class SystemIR {
public:
  const std::string &name() const { return name_; }
  std::span<const VarDecl> inputs() const { return inputs_; }
  std::span<const VarDecl> states() const { return states_; }
  std::span<const LabelDecl> labels() const { return labels_; }
  std::span<const ExprNode> nodes() const { return nodes_; }
  const ExprNode &node(ExprId id) const { return nodes_.at(id); }
  /// Next-state expression of state variable `state_index`.
  ExprId next(std::size_t state_index) const { return next_.at(state_index); }

  unsigned state_width() const { return state_width_; }
  unsigned input_width() const { return input_width_; }
  CBitVec initial_state() const { return CBitVec(state_width_, init_); }

  std::optional<std::size_t> find_label(std::string_view name) const;
  std::optional<std::size_t> find_state(std::string_view name) const;
  std::optional<std::size_t> find_input(std::string_view name) const;

  /// Which declared variable a flattened state / input bit belongs to.
  std::size_t state_var_of_bit(unsigned bit) const;
  std::size_t input_var_of_bit(unsigned bit) const;

  /// Nodes reachable from the next-state roots, in topological order.
  std::span<const ExprId> step_plan() const { return step_plan_; }
  /// Nodes reachable from the label roots, in topological order.
  std::span<const ExprId> label_plan() const { return label_plan_; }

  /// Renders the system back to `.msys` text.
  std::string to_text() const;

private:
  friend class SystemParser;

  std::string name_;
  std::vector<VarDecl> inputs_;
  std::vector<VarDecl> states_;
  std::vector<LabelDecl> labels_;
  std::vector<ExprNode> nodes_;
  std::vector<ExprId> next_;
  std::vector<ExprId> step_plan_;
  std::vector<ExprId> label_plan_;
  unsigned state_width_ = 0;
  unsigned input_width_ = 0;
  std::uint64_t init_ = 0;
};

/// Parses `.msys` text. Throws ParseError with a source location.
SystemIR parse_system(std::string_view text);
SystemIR load_system_file(const std::string &path);

// ---------------------------------------------------------------------------
// Evaluation

struct ConcreteStepResult {
  CBitVec next;
  std::vector<bool> labels;
};

ConcreteStepResult concrete_step(const SystemIR &ir, const CBitVec &state,
                                 const CBitVec &input);
/// Raw-integer versions used by the brute-force oracle.
std::uint64_t concrete_next(const SystemIR &ir, std::uint64_t state,
                            std::uint64_t input);
std::vector<bool> concrete_labels(const SystemIR &ir, std::uint64_t state);

struct AbstractEvalResult {
  TBitVec next;
  std::vector<TBit> labels;
};

AbstractEvalResult abstract_eval(const SystemIR &ir, const TBitVec &state,
                                 const TBitVec &input);
TBitVec abstract_next(const SystemIR &ir, const TBitVec &state,
                      const TBitVec &input);
std::vector<TBit> abstract_labels(const SystemIR &ir, const TBitVec &state);

struct MarkedBits {
  BitMask state_bits = 0;
  BitMask input_bits = 0;
  friend bool operator==(const MarkedBits &, const MarkedBits &) = default;
};

/// Unknown state/input bits that can influence the Unknown bits of
/// `target_state_bits` in the abstract successor. Bits whose abstract value
/// is already known never need explaining and are pruned, as are the
/// untaken branches of decided conditionals and dominated operands.
MarkedBits backward_mark(const SystemIR &ir, const TBitVec &state,
                         const TBitVec &input, BitMask target_state_bits);

/// Unknown state bits that can influence label `label_index` at `state`.
BitMask label_mark(const SystemIR &ir, const TBitVec &state,
                   std::size_t label_index);

// ---------------------------------------------------------------------------
// Built-in benchmark systems

enum class BenchmarkKind { Recoverable, NonRecoverable, LandingGear };

std::string_view to_string(BenchmarkKind kind);
std::optional<BenchmarkKind> parse_benchmark_kind(std::string_view text);

std::string benchmark_text(BenchmarkKind kind, unsigned v = 0, unsigned u = 0,
                           unsigned c = 0);
SystemIR generate_benchmark(BenchmarkKind kind, unsigned v = 0, unsigned u = 0,
                            unsigned c = 0);

} // namespace tvar
