#include "tvar/errors.hpp"
#include "tvar/sysir.hpp"

#include <bit>

namespace tvar {

namespace {

std::uint64_t eval_concrete_node(const ExprNode &n, const std::vector<std::uint64_t> &vals,
                                 const SystemIR &ir, std::uint64_t state, std::uint64_t input) {
  const std::uint64_t m = width_mask(n.width);
  auto op = [&](unsigned k) { return vals[n.operands[k]]; };
  switch (n.kind) {
  case ExprKind::Const:
    return n.value;
  case ExprKind::StateRef: {
    const auto &d = ir.states()[n.var];
    return (state >> d.offset) & m;
  }
  case ExprKind::InputRef: {
    const auto &d = ir.inputs()[n.var];
    return (input >> d.offset) & m;
  }
  case ExprKind::Not:
    return ~op(0) & m;
  case ExprKind::And:
    return op(0) & op(1);
  case ExprKind::Or:
    return op(0) | op(1);
  case ExprKind::Xor:
    return op(0) ^ op(1);
  case ExprKind::Add:
    return (op(0) + op(1)) & m;
  case ExprKind::Sub:
    return (op(0) - op(1)) & m;
  case ExprKind::Eq:
    return op(0) == op(1);
  case ExprKind::Ne:
    return op(0) != op(1);
  case ExprKind::Ult:
    return op(0) < op(1);
  case ExprKind::Ule:
    return op(0) <= op(1);
  case ExprKind::Shl:
    return n.lo >= 64 ? 0 : (op(0) << n.lo) & m;
  case ExprKind::Lshr:
    return n.lo >= 64 ? 0 : op(0) >> n.lo;
  case ExprKind::Slice:
    return (op(0) >> n.lo) & m;
  case ExprKind::Concat: {
    const unsigned lw = ir.node(n.operands[1]).width;
    return (lw >= 64 ? 0 : op(0) << lw) | op(1);
  }
  case ExprKind::Zext:
    return op(0);
  case ExprKind::Ite:
    return op(0) ? op(1) : op(2);
  }
  throw InternalError("unhandled expression kind");
}

void eval_concrete(const SystemIR &ir, std::span<const ExprId> plan, std::uint64_t state,
                   std::uint64_t input, std::vector<std::uint64_t> &vals) {
  vals.resize(ir.nodes().size());
  for (ExprId id : plan)
    vals[id] = eval_concrete_node(ir.node(id), vals, ir, state, input);
}

TBitVec eval_abstract_node(const ExprNode &n, const std::vector<TBitVec> &vals,
                           const SystemIR &ir, const TBitVec &state, const TBitVec &input) {
  auto op = [&](unsigned k) -> const TBitVec & { return vals[n.operands[k]]; };
  switch (n.kind) {
  case ExprKind::Const:
    return TBitVec::constant(n.width, n.value);
  case ExprKind::StateRef: {
    const auto &d = ir.states()[n.var];
    return slice(state, d.offset, d.offset + d.width - 1);
  }
  case ExprKind::InputRef: {
    const auto &d = ir.inputs()[n.var];
    return slice(input, d.offset, d.offset + d.width - 1);
  }
  case ExprKind::Not:
    return bit_not(op(0));
  case ExprKind::And:
    return bit_and(op(0), op(1));
  case ExprKind::Or:
    return bit_or(op(0), op(1));
  case ExprKind::Xor:
    return bit_xor(op(0), op(1));
  case ExprKind::Add:
    return add(op(0), op(1));
  case ExprKind::Sub:
    return sub(op(0), op(1));
  case ExprKind::Eq:
  case ExprKind::Ne:
  case ExprKind::Ult:
  case ExprKind::Ule: {
    static constexpr CompareOp ops[] = {CompareOp::Eq, CompareOp::Ne, CompareOp::Ult,
                                        CompareOp::Ule};
    const TBit b =
        compare(ops[static_cast<int>(n.kind) - static_cast<int>(ExprKind::Eq)], op(0), op(1));
    return TBitVec::from_masks(1, b == TBit::One, b == TBit::Unknown);
  }
  case ExprKind::Shl:
    return shl(op(0), n.lo);
  case ExprKind::Lshr:
    return lshr(op(0), n.lo);
  case ExprKind::Slice:
    return slice(op(0), n.lo, n.hi);
  case ExprKind::Concat:
    return concat(op(0), op(1));
  case ExprKind::Zext:
    return zext(op(0), n.width);
  case ExprKind::Ite:
    return ite(op(0).bit(0), op(1), op(2));
  }
  throw InternalError("unhandled expression kind");
}

void eval_abstract(const SystemIR &ir, std::span<const ExprId> plan, const TBitVec &state,
                   const TBitVec &input, std::vector<TBitVec> &vals) {
  vals.resize(ir.nodes().size());
  for (ExprId id : plan)
    vals[id] = eval_abstract_node(ir.node(id), vals, ir, state, input);
}

void check_widths(const SystemIR &ir, unsigned state_width, unsigned input_width) {
  if (state_width != ir.state_width())
    throw ContractViolation("state width " + std::to_string(state_width) + " does not match " +
                            std::to_string(ir.state_width()));
  if (input_width != ir.input_width())
    throw ContractViolation("input width " + std::to_string(input_width) + " does not match " +
                            std::to_string(ir.input_width()));
}

std::vector<std::uint64_t> &concrete_scratch() {
  thread_local std::vector<std::uint64_t> vals;
  return vals;
}

std::vector<TBitVec> &abstract_scratch() {
  thread_local std::vector<TBitVec> vals;
  return vals;
}

MarkedBits propagate_demand(const SystemIR &ir, std::span<const ExprId> plan,
                            const std::vector<TBitVec> &vals, std::vector<BitMask> &demand) {
  MarkedBits out;
  for (auto it = plan.rbegin(); it != plan.rend(); ++it) {
    const ExprId id = *it;
    const BitMask d = demand[id] & vals[id].unknown_mask();
    if (d == 0)
      continue;
    const ExprNode &n = ir.node(id);
    auto push = [&](unsigned k, BitMask m) { demand[n.operands[k]] |= m; };
    auto full = [&](unsigned k) { return width_mask(ir.node(n.operands[k]).width); };
    switch (n.kind) {
    case ExprKind::Const:
      break;
    case ExprKind::StateRef:
      out.state_bits |= d << ir.states()[n.var].offset;
      break;
    case ExprKind::InputRef:
      out.input_bits |= d << ir.inputs()[n.var].offset;
      break;
    case ExprKind::Not:
      push(0, d);
      break;
    case ExprKind::And:
    case ExprKind::Or:
    case ExprKind::Xor:
      push(0, d);
      push(1, d);
      break;
    case ExprKind::Add:
    case ExprKind::Sub: {
      const BitMask m = width_mask(static_cast<unsigned>(std::bit_width(d)));
      push(0, m);
      push(1, m);
      break;
    }
    case ExprKind::Eq:
    case ExprKind::Ne:
    case ExprKind::Ult:
    case ExprKind::Ule:
      push(0, full(0));
      push(1, full(1));
      break;
    case ExprKind::Shl:
      push(0, d >> n.lo);
      break;
    case ExprKind::Lshr:
      push(0, (d << n.lo) & full(0));
      break;
    case ExprKind::Slice:
      push(0, d << n.lo);
      break;
    case ExprKind::Concat: {
      const unsigned lw = ir.node(n.operands[1]).width;
      push(1, d & full(1));
      push(0, lw >= 64 ? 0 : d >> lw);
      break;
    }
    case ExprKind::Zext:
      push(0, d & full(0));
      break;
    case ExprKind::Ite:
      switch (vals[n.operands[0]].bit(0)) {
      case TBit::One:
        push(1, d);
        break;
      case TBit::Zero:
        push(2, d);
        break;
      case TBit::Unknown:
        push(0, 1);
        push(1, d);
        push(2, d);
        break;
      }
      break;
    }
  }
  return out;
}

} // namespace

ConcreteStepResult concrete_step(const SystemIR &ir, const CBitVec &state, const CBitVec &input) {
  check_widths(ir, state.width(), input.width());
  ConcreteStepResult r{CBitVec(ir.state_width(), concrete_next(ir, state.value(), input.value())),
                       concrete_labels(ir, state.value())};
  return r;
}

std::uint64_t concrete_next(const SystemIR &ir, std::uint64_t state, std::uint64_t input) {
  auto &vals = concrete_scratch();
  eval_concrete(ir, ir.step_plan(), state, input, vals);
  std::uint64_t next = 0;
  for (std::size_t i = 0; i < ir.states().size(); ++i)
    next |= vals[ir.next(i)] << ir.states()[i].offset;
  return next;
}

std::vector<bool> concrete_labels(const SystemIR &ir, std::uint64_t state) {
  auto &vals = concrete_scratch();
  eval_concrete(ir, ir.label_plan(), state, 0, vals);
  std::vector<bool> labels;
  labels.reserve(ir.labels().size());
  for (const auto &l : ir.labels())
    labels.push_back(vals[l.expr] != 0);
  return labels;
}

AbstractEvalResult abstract_eval(const SystemIR &ir, const TBitVec &state,
                                 const TBitVec &input) {
  return {abstract_next(ir, state, input), abstract_labels(ir, state)};
}

TBitVec abstract_next(const SystemIR &ir, const TBitVec &state, const TBitVec &input) {
  check_widths(ir, state.width(), input.width());
  auto &vals = abstract_scratch();
  eval_abstract(ir, ir.step_plan(), state, input, vals);
  BitMask ones = 0, unknown = 0;
  for (std::size_t i = 0; i < ir.states().size(); ++i) {
    const unsigned off = ir.states()[i].offset;
    ones |= vals[ir.next(i)].ones() << off;
    unknown |= vals[ir.next(i)].unknown_mask() << off;
  }
  return TBitVec::from_masks(ir.state_width(), ones, unknown);
}

std::vector<TBit> abstract_labels(const SystemIR &ir, const TBitVec &state) {
  if (state.width() != ir.state_width())
    throw ContractViolation("state width mismatch");
  auto &vals = abstract_scratch();
  eval_abstract(ir, ir.label_plan(), state, TBitVec(), vals);
  std::vector<TBit> labels;
  labels.reserve(ir.labels().size());
  for (const auto &l : ir.labels())
    labels.push_back(vals[l.expr].bit(0));
  return labels;
}

MarkedBits backward_mark(const SystemIR &ir, const TBitVec &state, const TBitVec &input,
                         BitMask target_state_bits) {
  check_widths(ir, state.width(), input.width());
  std::vector<TBitVec> vals;
  eval_abstract(ir, ir.step_plan(), state, input, vals);
  std::vector<BitMask> demand(ir.nodes().size(), 0);
  for (std::size_t i = 0; i < ir.states().size(); ++i) {
    const auto &d = ir.states()[i];
    demand[ir.next(i)] |= (target_state_bits >> d.offset) & width_mask(d.width);
  }
  return propagate_demand(ir, ir.step_plan(), vals, demand);
}

BitMask label_mark(const SystemIR &ir, const TBitVec &state, std::size_t label_index) {
  if (state.width() != ir.state_width())
    throw ContractViolation("state width mismatch");
  if (label_index >= ir.labels().size())
    throw ContractViolation("label index out of range");
  std::vector<TBitVec> vals;
  eval_abstract(ir, ir.label_plan(), state, TBitVec(), vals);
  std::vector<BitMask> demand(ir.nodes().size(), 0);
  demand[ir.labels()[label_index].expr] = 1;
  return propagate_demand(ir, ir.label_plan(), vals, demand).state_bits;
}

} // namespace tvar
