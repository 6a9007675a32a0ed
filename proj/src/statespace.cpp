#include "tvar/statespace.hpp"

#include "tvar/errors.hpp"

#include <algorithm>
#include <unordered_set>
#include <sstream>

namespace tvar {

std::size_t PKS::transition_count() const {
  std::size_t n = 0;
  for (const auto &e : edges)
    n += e.size();
  return n;
}

std::optional<StateId> PKS::find(const TBitVec &s) const {
  auto it = index.find(s);
  if (it == index.end())
    return std::nullopt;
  return it->second;
}

bool PKS::has_transition(StateId from, StateId to) const {
  for (const auto &e : edges.at(from))
    if (e.to == to)
      return true;
  return false;
}

bool PKS::has_unknown_labels() const {
  for (const auto &ls : labels)
    for (TBit b : ls)
      if (b == TBit::Unknown)
        return true;
  return false;
}

StateId PKS::add_state(const TBitVec &s, std::vector<TBit> state_labels) {
  const auto id = static_cast<StateId>(states.size());
  if (!index.emplace(s, id).second)
    throw ContractViolation("duplicate state " + s.quoted());
  states.push_back(s);
  edges.emplace_back();
  labels.push_back(std::move(state_labels));
  input_masks.push_back(0);
  step_masks.push_back(0);
  return id;
}

bool PKS::add_transition(StateId from, StateId to, const TBitVec &via) {
  if (has_transition(from, to))
    return false;
  edges.at(from).push_back({to, via});
  return true;
}

void PKS::remove_transition(StateId from, StateId to) {
  auto &es = edges.at(from);
  es.erase(std::remove_if(es.begin(), es.end(), [&](const Edge &e) { return e.to == to; }),
           es.end());
}

namespace {

struct PatternPairHash {
  std::size_t operator()(const std::pair<TBitVec, TBitVec> &p) const noexcept {
    TBitVecHash h;
    return h(p.first) * 31 + h(p.second);
  }
};

} // namespace

PKS build_pks(const AbstractGA &aga, const PKS *previous, const BuildLimits &limits,
              BuildStats *stats) {
  const SystemIR &ir = *aga.ir;
  PKS pks;
  pks.state_width = ir.state_width();
  pks.input_width = ir.input_width();
  for (const auto &l : ir.labels())
    pks.label_names.push_back(l.name);

  BuildStats local;
  // Stamp per target state, to deduplicate successors of the state being
  // expanded in constant time.
  std::vector<StateId> seen_from;

  auto discover = [&](const TBitVec &s) -> StateId {
    if (auto id = pks.find(s))
      return *id;
    if (limits.max_states && pks.states.size() >= limits.max_states)
      throw ResourceLimit("state limit of " + std::to_string(limits.max_states) + " exceeded",
                          pks.states.size(), pks.transition_count());
    std::optional<StateId> old = previous ? previous->find(s) : std::nullopt;
    const StateId id =
        pks.add_state(s, old ? previous->labels[*old] : abstract_labels(ir, s));
    seen_from.push_back(StateId(-1));
    if (!old)
      ++local.states_generated;
    return id;
  };

  auto link = [&](StateId from, StateId to, const TBitVec &via) {
    if (seen_from[to] == from)
      return;
    seen_from[to] = from;
    pks.edges[from].push_back({to, via});
  };

  pks.initial = discover(initial_abstract_state(aga));
  const bool naive_fast = aga.fault == Fault::None;
  for (StateId cur = 0; cur < pks.states.size(); ++cur) {
    if (limits.deadline && (cur & 63) == 0 &&
        std::chrono::steady_clock::now() > *limits.deadline)
      throw ResourceLimit("time limit exceeded", pks.states.size(), pks.transition_count());
    const TBitVec s = pks.states[cur];
    const BitMask qm = input_mask(aga, s);
    const BitMask fm = step_mask(aga, s);
    pks.input_masks[cur] = qm;
    pks.step_masks[cur] = fm;

    std::optional<StateId> old = previous ? previous->find(s) : std::nullopt;
    if (old && previous->input_masks[*old] == qm && previous->step_masks[*old] == fm) {
      for (const Edge &e : previous->edges[*old]) {
        const StateId to = discover(previous->states[e.to]);
        link(cur, to, e.via);
      }
      continue;
    }
    ++local.states_expanded;
    const bool concrete_state = s.is_concrete();
    const BitMask full_w = width_mask(ir.state_width());
    for (const TBitVec &in : qualified_inputs(aga, s)) {
      TBitVec next;
      if (naive_fast && concrete_state && in.is_concrete() && fm == full_w)
        next = TBitVec::constant(ir.state_width(), concrete_next(ir, s.ones(), in.ones()));
      else
        next = abstract_step(aga, s, in);
      const StateId to = discover(next);
      link(cur, to, in);
    }
  }

  if (previous) {
    std::unordered_set<std::pair<TBitVec, TBitVec>, PatternPairHash> old_pairs;
    for (StateId f = 0; f < previous->states.size(); ++f)
      for (const Edge &e : previous->edges[f])
        old_pairs.insert({previous->states[f], previous->states[e.to]});
    for (StateId f = 0; f < pks.states.size(); ++f)
      for (const Edge &e : pks.edges[f])
        if (!old_pairs.count({pks.states[f], pks.states[e.to]}))
          ++local.transitions_generated;
  } else {
    local.transitions_generated = pks.transition_count();
  }
  if (stats)
    *stats = local;
  return pks;
}

bool same_relation(const PKS &a, const PKS &b) {
  if (a.states.size() != b.states.size() || a.transition_count() != b.transition_count())
    return false;
  for (const auto &s : a.states)
    if (!b.find(s))
      return false;
  for (StateId f = 0; f < a.states.size(); ++f) {
    const StateId bf = *b.find(a.states[f]);
    for (const Edge &e : a.edges[f]) {
      auto bt = b.find(a.states[e.to]);
      if (!b.has_transition(bf, *bt))
        return false;
    }
  }
  return true;
}

bool structurally_equal(const PKS &a, const PKS &b) {
  if (!same_relation(a, b) || a.label_names != b.label_names)
    return false;
  if (a.states.at(a.initial) != b.states.at(b.initial))
    return false;
  for (StateId s = 0; s < a.states.size(); ++s)
    if (a.labels[s] != b.labels[*b.find(a.states[s])])
      return false;
  return true;
}

std::string export_dot(const PKS &pks) {
  std::ostringstream os;
  os << "digraph pks {\n";
  os << "  node [shape=box, fontname=\"monospace\"];\n";
  for (StateId s = 0; s < pks.states.size(); ++s) {
    os << "  \"" << pks.states[s].str() << "\" [";
    bool any_unknown = false;
    for (std::size_t l = 0; l < pks.label_names.size(); ++l) {
      const TBit b = pks.labels[s][l];
      any_unknown |= b == TBit::Unknown;
      os << pks.label_names[l] << "=\"" << (b == TBit::Unknown ? "⊥" : std::string(1, to_char(b)))
         << "\", ";
    }
    if (s == pks.initial)
      os << "peripheries=2, ";
    os << "style=filled, fillcolor=" << (any_unknown ? "grey" : "white") << "];\n";
  }
  for (StateId s = 0; s < pks.states.size(); ++s)
    for (const Edge &e : pks.edges[s])
      os << "  \"" << pks.states[s].str() << "\" -> \"" << pks.states[e.to].str()
         << "\" [label=\"" << (pks.input_width ? e.via.str() : std::string()) << "\"];\n";
  os << "}\n";
  return os.str();
}

} // namespace tvar
