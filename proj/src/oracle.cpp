#include "tvar/oracle.hpp"

#include "tvar/errors.hpp"
#include "tvar/mc3.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <unordered_map>

namespace tvar {

PKS build_concrete_ks(const SystemIR &ir, std::size_t cap) {
  PKS ks;
  ks.state_width = ir.state_width();
  ks.input_width = ir.input_width();
  for (const auto &l : ir.labels())
    ks.label_names.push_back(l.name);

  const unsigned w = ir.state_width(), y = ir.input_width();
  std::unordered_map<std::uint64_t, StateId> index;
  std::vector<StateId> seen_from;
  auto discover = [&](std::uint64_t s) -> StateId {
    auto it = index.find(s);
    if (it != index.end())
      return it->second;
    if (ks.states.size() >= cap)
      throw ResourceLimit("concrete state space exceeds " + std::to_string(cap) + " states",
                          ks.states.size(), ks.transition_count());
    std::vector<TBit> labels;
    for (bool b : concrete_labels(ir, s))
      labels.push_back(to_tbit(b));
    const StateId id = ks.add_state(TBitVec::constant(w, s), std::move(labels));
    index.emplace(s, id);
    seen_from.push_back(StateId(-1));
    return id;
  };

  ks.initial = discover(ir.initial_state().value());
  const std::uint64_t input_count = y >= 64 ? 0 : std::uint64_t{1} << y;
  if (y >= 40)
    throw ResourceLimit("concrete input space of 2^" + std::to_string(y) + " is too large", 1, 0);
  for (StateId cur = 0; cur < ks.states.size(); ++cur) {
    ks.input_masks[cur] = width_mask(y);
    ks.step_masks[cur] = width_mask(w);
    const std::uint64_t s = ks.states[cur].ones();
    for (std::uint64_t i = 0; i < input_count; ++i) {
      const StateId to = discover(concrete_next(ir, s, i));
      if (seen_from[to] == cur)
        continue;
      seen_from[to] = cur;
      ks.edges[cur].push_back({to, TBitVec::constant(y, i)});
    }
  }
  return ks;
}

bool verify_concrete(const SystemIR &ir, const FormulaPtr &phi, std::size_t cap) {
  return model_check2(build_concrete_ks(ir, cap), phi).value;
}

void AuditReport::add(const std::string &condition, std::string witness) {
  if (counts[condition]++ < 8)
    violations.push_back({condition, std::move(witness)});
}

void AuditReport::merge(const AuditReport &other) {
  for (const auto &v : other.violations)
    if (std::count_if(violations.begin(), violations.end(),
                      [&](const Violation &x) { return x.condition == v.condition; }) < 8)
      violations.push_back(v);
  for (const auto &[c, n] : other.counts)
    counts[c] += n;
}

void AuditReport::canonicalize() {
  std::sort(violations.begin(), violations.end(), [](const Violation &a, const Violation &b) {
    return std::tie(a.condition, a.witness) < std::tie(b.condition, b.witness);
  });
}

namespace {

std::string labels_text(const std::vector<TBit> &ls) {
  std::string s;
  for (TBit b : ls)
    s += to_char(b);
  return s;
}

/// Concrete members of γ(a): all of them when few, otherwise a random
/// sample that always includes the bounds.
std::vector<std::uint64_t> concretizations(const TBitVec &a, std::size_t limit,
                                           std::mt19937_64 &rng) {
  std::vector<std::uint64_t> out;
  const unsigned k = a.unknown_count();
  if (k < 63 && (std::uint64_t{1} << k) <= limit) {
    for_each_concretization(a, [&](std::uint64_t v) { out.push_back(v); });
    return out;
  }
  const Bounds b = bounds(a);
  out.push_back(b.umin);
  out.push_back(b.umax);
  while (out.size() < limit)
    out.push_back(a.ones() | (rng() & a.unknown_mask()));
  return out;
}

std::vector<TBitVec> sample_states(const AbstractGA &aga, const Sampler &sampler,
                                   std::mt19937_64 &rng) {
  const unsigned w = aga.ir->state_width();
  std::vector<TBitVec> out;
  if (sampler.mode == Sampler::Mode::Reachable) {
    BuildLimits limits;
    limits.max_states = sampler.max_states;
    PKS pks = build_pks(aga, nullptr, limits);
    return pks.states;
  }
  std::uint64_t total = 1;
  bool small = true;
  for (unsigned k = 0; k < w && small; ++k) {
    total *= 3;
    small = total <= sampler.max_states;
  }
  if (small) {
    for (std::uint64_t code = 0; code < total; ++code) {
      std::uint64_t c = code;
      BitMask ones = 0, unk = 0;
      for (unsigned k = 0; k < w; ++k, c /= 3) {
        if (c % 3 == 1)
          ones |= BitMask{1} << k;
        else if (c % 3 == 2)
          unk |= BitMask{1} << k;
      }
      out.push_back(TBitVec::from_masks(w, ones, unk));
    }
    return out;
  }
  out.push_back(initial_abstract_state(aga));
  while (out.size() < sampler.max_states) {
    const BitMask unk = rng() & rng() & width_mask(w);
    out.push_back(TBitVec::from_masks(w, rng() & ~unk & width_mask(w), unk));
  }
  return out;
}

std::vector<TBitVec> one_bit_refinements(const TBitVec &a) {
  std::vector<TBitVec> out;
  for (unsigned k = 0; k < a.width(); ++k)
    if (a.bit(k) == TBit::Unknown) {
      out.push_back(a.with_bit(k, TBit::Zero));
      out.push_back(a.with_bit(k, TBit::One));
    }
  return out;
}

template <class T> std::vector<T> cap_list(std::vector<T> v, std::size_t limit, std::mt19937_64 &rng) {
  if (v.size() <= limit)
    return v;
  std::shuffle(v.begin(), v.end(), rng);
  v.resize(limit);
  return v;
}

std::vector<std::uint64_t> concrete_inputs(unsigned y, std::size_t limit, std::mt19937_64 &rng) {
  return concretizations(TBitVec::unknown(y), limit, rng);
}

} // namespace

AuditReport audit_soundness(const AbstractGA &aga, const Sampler &sampler) {
  const SystemIR &ir = *aga.ir;
  const unsigned y = ir.input_width();
  std::mt19937_64 rng(sampler.seed);
  AuditReport rep;

  const TBitVec init = initial_abstract_state(aga);
  if (!init.is_concrete() || init.ones() != ir.initial_state().value())
    rep.add("6a", "initial abstract state " + init.quoted());

  for (const TBitVec &s : sample_states(aga, sampler, rng)) {
    const std::vector<TBit> lab = abstract_labels(ir, s);
    const auto members = concretizations(s, sampler.max_concretizations, rng);
    for (std::uint64_t c : members) {
      const std::vector<bool> cl = concrete_labels(ir, c);
      for (std::size_t l = 0; l < lab.size(); ++l)
        if (lab[l] != TBit::Unknown && (lab[l] == TBit::One) != cl[l])
          rep.add("6b", "label " + ir.labels()[l].name + " at " + s.quoted() + " vs " +
                            TBitVec::constant(s.width(), c).quoted());
    }
    const auto refinements = one_bit_refinements(s);
    for (const TBitVec &r : refinements) {
      const std::vector<TBit> rl = abstract_labels(ir, r);
      for (std::size_t l = 0; l < lab.size(); ++l)
        if (lab[l] != TBit::Unknown && rl[l] != lab[l])
          rep.add("7a", "label " + ir.labels()[l].name + " at " + s.quoted() + " vs " +
                            r.quoted());
    }

    const std::vector<TBitVec> qualified = qualified_inputs(aga, s);
    for (std::uint64_t i : concrete_inputs(y, sampler.max_concretizations, rng)) {
      const bool covered = std::any_of(qualified.begin(), qualified.end(),
                                       [&](const TBitVec &q) { return gamma_contains(q, i); });
      if (!covered)
        rep.add("6c", "input " + TBitVec::constant(y, i).quoted() + " at " + s.quoted());
    }

    std::vector<TBitVec> inputs = cap_list(qualified, sampler.max_concretizations, rng);
    for (const TBitVec &in : inputs) {
      const TBitVec next = abstract_step(aga, s, in);
      const auto in_members = concretizations(in, 8, rng);
      for (std::uint64_t c : cap_list(members, 8, rng))
        for (std::uint64_t i : in_members)
          if (!gamma_contains(next, concrete_next(ir, c, i)))
            rep.add("6d", "step " + s.quoted() + "," + in.quoted() + " -> " + next.quoted() +
                              " misses concrete successor");
    }

    inputs.push_back(TBitVec::unknown(y));
    for (const TBitVec &in : inputs) {
      const TBitVec base = abstract_step(aga, s, in);
      for (const TBitVec &r : refinements) {
        const TBitVec fine = abstract_step(aga, r, in);
        if (!covers(base, fine))
          rep.add("7b", "f(" + s.quoted() + "," + in.quoted() + ") = " + base.quoted() +
                            " does not cover f(" + r.quoted() + ",...) = " + fine.quoted());
      }
      for (const TBitVec &ri : one_bit_refinements(in)) {
        const TBitVec fine = abstract_step(aga, s, ri);
        if (!covers(base, fine))
          rep.add("7b", "f(" + s.quoted() + "," + in.quoted() + ") = " + base.quoted() +
                            " does not cover f(...," + ri.quoted() + ") = " + fine.quoted());
      }
    }
  }
  rep.canonicalize();
  return rep;
}

AuditReport audit_terminating(const AbstractGA &aga, const Sampler &sampler) {
  const SystemIR &ir = *aga.ir;
  const unsigned w = ir.state_width(), y = ir.input_width();
  std::mt19937_64 rng(sampler.seed);
  AuditReport rep;

  std::vector<TBitVec> states;
  if (sampler.mode == Sampler::Mode::Reachable) {
    for (const TBitVec &s : build_concrete_ks(ir, sampler.max_states).states)
      states.push_back(s);
  } else if (w < 63 && (std::uint64_t{1} << w) <= sampler.max_states) {
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << w); ++s)
      states.push_back(TBitVec::constant(w, s));
  } else {
    for (std::uint64_t s : concretizations(TBitVec::unknown(w), sampler.max_states, rng))
      states.push_back(TBitVec::constant(w, s));
  }

  const bool all_inputs = y < 63 && (std::uint64_t{1} << y) <= sampler.max_concretizations;
  for (const TBitVec &s : states) {
    const std::uint64_t c = s.ones();
    const std::vector<TBit> lab = abstract_labels(ir, s);
    const std::vector<bool> cl = concrete_labels(ir, c);
    for (std::size_t l = 0; l < lab.size(); ++l)
      if (lab[l] == TBit::Unknown || (lab[l] == TBit::One) != cl[l])
        rep.add("11a", "label " + ir.labels()[l].name + " at " + s.quoted());

    const std::vector<TBitVec> qualified = qualified_inputs(aga, s);
    for (const TBitVec &q : qualified)
      if (!q.is_concrete())
        rep.add("11b", "qualified input " + q.quoted() + " at " + s.quoted());
    for (std::uint64_t i : concrete_inputs(y, sampler.max_concretizations, rng)) {
      const bool exact = std::any_of(qualified.begin(), qualified.end(), [&](const TBitVec &q) {
        return q.is_concrete() && q.ones() == i;
      });
      if (!exact)
        rep.add("11c", "no singleton qualified input " + TBitVec::constant(y, i).quoted() +
                           " at " + s.quoted());
      const TBitVec next = abstract_step(aga, s, TBitVec::constant(y, i));
      const std::uint64_t expect = concrete_next(ir, c, i);
      if (!next.is_concrete() || next.ones() != expect)
        rep.add("11d", "f(" + s.quoted() + "," + TBitVec::constant(y, i).quoted() + ") = " +
                           next.quoted() + ", expected " + TBitVec::constant(w, expect).quoted());
    }
    if (all_inputs && qualified.size() != (std::size_t{1} << y))
      rep.add("11c", std::to_string(qualified.size()) + " qualified inputs at " + s.quoted());
  }
  rep.canonicalize();
  return rep;
}

AuditReport check_modal_simulation(const PKS &ks, const PKS &pks) {
  if (ks.state_width != pks.state_width || ks.input_width != pks.input_width)
    throw ContractViolation("modal simulation check: width mismatch");
  AuditReport rep;
  const TBitVec &ks_init = ks.states.at(ks.initial);
  if (!gamma_contains(pks.states.at(pks.initial), ks_init.ones()))
    rep.add("init", "initial " + ks_init.quoted() + " not in γ(" +
                        pks.states[pks.initial].quoted() + ")");

  for (StateId s = 0; s < ks.states.size(); ++s) {
    const std::uint64_t cs = ks.states[s].ones();
    for (StateId a = 0; a < pks.states.size(); ++a) {
      const TBitVec &as = pks.states[a];
      if (!gamma_contains(as, cs))
        continue;
      for (std::size_t l = 0; l < pks.label_names.size(); ++l) {
        const TBit al = pks.labels[a][l];
        if (al != TBit::Unknown && al != ks.labels[s][l])
          rep.add("12a", "label " + pks.label_names[l] + " of " + as.quoted() + " is " +
                             to_char(al) + " but " + ks.states[s].quoted() + " has " +
                             labels_text(ks.labels[s]));
      }
      for (const Edge &ce : ks.edges[s]) {
        const std::uint64_t ct = ks.states[ce.to].ones();
        const bool matched = std::any_of(pks.edges[a].begin(), pks.edges[a].end(), [&](const Edge &ae) {
          return gamma_contains(pks.states[ae.to], ct);
        });
        if (!matched)
          rep.add("12b", ks.states[s].quoted() + " -> " + ks.states[ce.to].quoted() +
                             " unmatched from " + as.quoted());
      }
      for (const Edge &ae : pks.edges[a]) {
        const TBitVec &at = pks.states[ae.to];
        const bool matched = std::any_of(ks.edges[s].begin(), ks.edges[s].end(), [&](const Edge &ce) {
          return gamma_contains(at, ks.states[ce.to].ones());
        });
        if (!matched)
          rep.add("12c", as.quoted() + " -> " + at.quoted() + " unmatched from " +
                             ks.states[s].quoted());
      }
    }
  }
  rep.canonicalize();
  return rep;
}

} // namespace tvar
