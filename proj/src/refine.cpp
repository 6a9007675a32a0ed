#include "tvar/refine.hpp"

#include "tvar/errors.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <set>
#include <unordered_map>

namespace tvar {

std::string_view to_string(CandidateKind k) {
  return k == CandidateKind::StepBit ? "step" : "input";
}

namespace {

bool is_literal(const Formula &f) {
  return f.kind == FKind::Atom || (f.kind == FKind::Not && f.lhs().kind == FKind::Atom);
}

const std::string &literal_atom(const Formula &f) {
  return f.kind == FKind::Atom ? f.atom : f.lhs().atom;
}

bool temporal(FKind k) {
  switch (k) {
  case FKind::AX:
  case FKind::EX:
  case FKind::AF:
  case FKind::EF:
  case FKind::AG:
  case FKind::EG:
  case FKind::AU:
  case FKind::EU:
    return true;
  default:
    return false;
  }
}

} // namespace

std::optional<Culprit> find_culprit(const PKS &pks, const Labelling &lab) {
  const std::size_t nsub = lab.subformulas.size();
  std::vector<std::vector<std::size_t>> kids(nsub);
  for (std::size_t i = 0; i < nsub; ++i)
    for (const auto &k : lab.subformulas[i]->kids)
      kids[i].push_back(lab.index_of(k.get()));

  struct Node {
    StateId state;
    std::size_t sub;
    std::size_t parent;
    const TBitVec *via;
  };
  std::vector<Node> nodes;
  std::unordered_map<std::uint64_t, std::size_t> seen;
  auto push = [&](StateId s, std::size_t sub, std::size_t parent, const TBitVec *via) {
    if (lab.value(s, sub) != ThreeValued::Unknown)
      return;
    const std::uint64_t key = std::uint64_t{s} * nsub + sub;
    if (seen.emplace(key, nodes.size()).second)
      nodes.push_back({s, sub, parent, via});
  };

  push(pks.initial, lab.root(), std::size_t(-1), nullptr);
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    const Node cur = nodes[head];
    const Formula &f = *lab.subformulas[cur.sub];
    if (is_literal(f)) {
      Culprit c;
      const auto &names = pks.label_names;
      c.label = static_cast<std::size_t>(
          std::find(names.begin(), names.end(), literal_atom(f)) - names.begin());
      std::vector<std::size_t> chain;
      for (std::size_t i = head; i != std::size_t(-1); i = nodes[i].parent)
        chain.push_back(i);
      std::reverse(chain.begin(), chain.end());
      c.path.push_back(nodes[chain.front()].state);
      for (std::size_t i : chain)
        if (nodes[i].via) {
          c.path.push_back(nodes[i].state);
          c.vias.push_back(*nodes[i].via);
        }
      return c;
    }
    for (std::size_t k : kids[cur.sub])
      if (!(f.kind == FKind::AX || f.kind == FKind::EX))
        push(cur.state, k, head, nullptr);
    if (temporal(f.kind)) {
      const bool next_only = f.kind == FKind::AX || f.kind == FKind::EX;
      for (const Edge &e : pks.edges[cur.state])
        push(e.to, next_only ? kids[cur.sub][0] : cur.sub, head, &e.via);
    }
  }
  return std::nullopt;
}

std::vector<RefinementCandidate> propose_candidates(const AbstractGA &aga, const PKS &pks,
                                                    const Labelling &lab) {
  if (lab.value(pks.initial, lab.root()) != ThreeValued::Unknown)
    throw ContractViolation("candidates requested for a decided verdict");
  const SystemIR &ir = *aga.ir;
  std::vector<RefinementCandidate> out;
  const auto culprit = find_culprit(pks, lab);
  if (!culprit)
    return out;

  const auto &path = culprit->path;
  BitMask marked = label_mark(ir, pks.states[path.back()], culprit->label);
  for (std::size_t j = path.size() - 1; j-- > 0 && marked != 0;) {
    const TBitVec &s = pks.states[path[j]];
    const TBitVec &via = culprit->vias[j];
    const auto distance = static_cast<unsigned>(path.size() - 1 - j);
    const BitMask fm = step_mask(aga, s);
    const BitMask qm = input_mask(aga, s);
    for (unsigned k = 0; k < ir.state_width(); ++k)
      if ((marked & ~fm) >> k & 1)
        out.push_back({CandidateKind::StepBit, s, k, distance});
    const TBitVec basic = abstract_next(ir, s, via);
    // Decayed bits whose basic value is X too still need an explanation.
    const BitMask explain = marked & basic.unknown_mask();
    if (explain == 0)
      break;
    const MarkedBits mb = backward_mark(ir, s, via, explain);
    for (unsigned k = 0; k < ir.input_width(); ++k)
      if ((mb.input_bits & ~qm) >> k & 1)
        out.push_back({CandidateKind::InputBit, s, k, distance});
    marked = mb.state_bits;
  }

  auto var_index = [&](const RefinementCandidate &c) {
    return c.kind == CandidateKind::StepBit ? ir.state_var_of_bit(c.bit)
                                            : ir.input_var_of_bit(c.bit);
  };
  std::stable_sort(out.begin(), out.end(),
                   [&](const RefinementCandidate &a, const RefinementCandidate &b) {
                     if (a.kind != b.kind)
                       return a.kind == CandidateKind::StepBit;
                     if (a.distance != b.distance)
                       return a.distance < b.distance;
                     const auto va = var_index(a), vb = var_index(b);
                     if (va != vb)
                       return va < vb;
                     return a.bit > b.bit;
                   });
  std::vector<RefinementCandidate> unique;
  for (const auto &c : out)
    if (std::none_of(unique.begin(), unique.end(), [&](const RefinementCandidate &u) {
          return u.kind == c.kind && u.bit == c.bit && u.state == c.state;
        }))
      unique.push_back(c);
  return unique;
}

std::vector<RefinementCandidate> exhaustive_candidates(const AbstractGA &aga, const PKS &pks) {
  std::vector<RefinementCandidate> out;
  const unsigned w = aga.ir->state_width(), y = aga.ir->input_width();
  for (const TBitVec &s : pks.states) {
    const BitMask fm = step_mask(aga, s);
    for (unsigned k = w; k-- > 0;)
      if (!(fm >> k & 1))
        out.push_back({CandidateKind::StepBit, s, k, 0});
  }
  for (const TBitVec &s : pks.states) {
    const BitMask qm = input_mask(aga, s);
    for (unsigned k = y; k-- > 0;)
      if (!(qm >> k & 1))
        out.push_back({CandidateKind::InputBit, s, k, 0});
  }
  return out;
}

RefineResult apply_candidates(const AbstractGA &aga,
                              const std::vector<RefinementCandidate> &candidates,
                              const PKS &pks, const BuildLimits &limits, std::size_t iteration) {
  RefineResult r;
  r.aga = aga;
  r.pks = pks;
  for (const auto &c : candidates) {
    const bool step = c.kind == CandidateKind::StepBit;
    const BitMask before = step ? step_mask(r.aga, c.state) : input_mask(r.aga, c.state);
    if (before >> c.bit & 1)
      continue;
    (step ? r.aga.pf : r.aga.pq).raise(c.state, c.bit);
    BuildStats bs;
    PKS next = build_pks(r.aga, &r.pks, limits, &bs);
    r.states_generated += bs.states_generated;
    r.transitions_generated += bs.transitions_generated;
    const bool changed = !same_relation(next, pks);
    r.raises.push_back({iteration, c.kind, c.state, c.bit, changed});
    r.pks = std::move(next);
    if (changed) {
      r.changed = true;
      break;
    }
  }
  return r;
}

RefineResult refine_strict(const AbstractGA &aga,
                           const std::vector<RefinementCandidate> &candidates, const PKS &pks,
                           const BuildLimits &limits, std::size_t iteration) {
  if (candidates.empty())
    throw ContractViolation("refine_strict needs at least one candidate");
  RefineResult r = apply_candidates(aga, candidates, pks, limits, iteration);
  if (!r.changed) {
    std::string applied;
    for (const auto &e : r.raises)
      applied += " " + std::string(to_string(e.kind)) + "(" + e.state.quoted() + "," +
                 std::to_string(e.bit) + ")";
    throw InternalError("candidate list exhausted without changing the transition relation;"
                        " applied:" +
                        (applied.empty() ? std::string(" none") : applied));
  }
  return r;
}

namespace {

std::size_t raised_state_count(const AbstractGA &aga) {
  std::set<std::string> states;
  for (const auto &e : aga.pq.overrides())
    states.insert(e.state.str());
  for (const auto &e : aga.pf.overrides())
    states.insert(e.state.str());
  return states.size();
}

} // namespace

VerifyOutcome verify_loop(std::shared_ptr<const SystemIR> ir, const FormulaPtr &phi,
                          Strategy strategy, const VerifyOptions &options) {
  check_atoms(*phi, [&] {
    std::vector<std::string> names;
    for (const auto &l : ir->labels())
      names.push_back(l.name);
    return names;
  }());

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  VerifyOutcome out;
  out.aga = make_ga(std::move(ir), strategy);
  out.aga.fault = options.fault;

  BuildLimits limits;
  limits.max_states = options.limits.max_states;
  if (options.limits.timeout_s > 0)
    limits.deadline = start + std::chrono::duration_cast<clock::duration>(
                                  std::chrono::duration<double>(options.limits.timeout_s));

  auto finish = [&] {
    out.stats.states_final = out.pks.states.size();
    out.stats.transitions_final = out.pks.transition_count();
    out.stats.raised_states = raised_state_count(out.aga);
    out.stats.wall_time_s = std::chrono::duration<double>(clock::now() - start).count();
    return out;
  };
  auto limit = [&](const std::string &why) {
    out.result = ThreeValued::Unknown;
    out.limit_hit = true;
    out.limit_reason = why;
    return finish();
  };

  try {
    BuildStats bs;
    out.pks = build_pks(out.aga, nullptr, limits, &bs);
    out.stats.states_total += bs.states_generated;
    out.stats.transitions_total += bs.transitions_generated;
    for (std::size_t iteration = 0;; ++iteration) {
      const MC3Result mc = model_check3(out.pks, phi);
      if (options.on_iteration)
        options.on_iteration({iteration, out.aga, out.pks, mc});
      if (mc.value != ThreeValued::Unknown) {
        out.result = mc.value;
        return finish();
      }
      if (out.stats.refinements >= options.limits.max_refinements)
        return limit("refinement limit of " + std::to_string(options.limits.max_refinements) +
                     " reached");
      if (limits.deadline && clock::now() > *limits.deadline)
        return limit("time limit exceeded");

      RefineResult rr = apply_candidates(
          out.aga, propose_candidates(out.aga, out.pks, mc.labelling), out.pks, limits,
          iteration);
      if (!rr.changed) {
        ++out.stats.fallback_refinements;
        RefineResult more = refine_strict(rr.aga, exhaustive_candidates(rr.aga, rr.pks),
                                          out.pks, limits, iteration);
        more.raises.insert(more.raises.begin(), rr.raises.begin(), rr.raises.end());
        more.states_generated += rr.states_generated;
        more.transitions_generated += rr.transitions_generated;
        rr = std::move(more);
      }
      for (const auto &e : rr.raises) {
        ++out.stats.raises;
        if (options.on_raise)
          options.on_raise(e);
      }
      out.stats.states_total += rr.states_generated;
      out.stats.transitions_total += rr.transitions_generated;
      out.aga = std::move(rr.aga);
      out.pks = std::move(rr.pks);
      ++out.stats.refinements;
    }
  } catch (const ResourceLimit &e) {
    return limit(e.what());
  }
}

} // namespace tvar
