#include "tvar/mc3.hpp"

#include "tvar/errors.hpp"

#include <algorithm>

namespace tvar {

std::string_view to_string(ThreeValued v) {
  switch (v) {
  case ThreeValued::False:
    return "false";
  case ThreeValued::True:
    return "true";
  case ThreeValued::Unknown:
    return "unknown";
  }
  return "?";
}

std::size_t Labelling::index_of(const Formula *f) const {
  for (std::size_t i = 0; i < subformulas.size(); ++i)
    if (subformulas[i] == f)
      return i;
  throw ContractViolation("formula is not a subformula of the labelling");
}

ThreeValued Labelling::value(StateId s, std::size_t sub) const {
  if (pessimistic[sub][s])
    return ThreeValued::True;
  if (!optimistic[sub][s])
    return ThreeValued::False;
  return ThreeValued::Unknown;
}

void check_atoms(const Formula &phi, const std::vector<std::string> &labels) {
  for (const auto &a : atoms_of(phi))
    if (std::find(labels.begin(), labels.end(), a) == labels.end())
      throw FormulaError("unknown atom '" + a + "' in property");
}

namespace {

enum class Mode { Exact, Pessimistic, Optimistic };

void post_order(const Formula &f, std::vector<const Formula *> &out) {
  for (const auto &k : f.kids)
    post_order(*k, out);
  out.push_back(&f);
}

class Checker {
public:
  explicit Checker(const PKS &pks) : pks_(pks), n_(pks.states.size()), preds_(n_) {
    for (StateId s = 0; s < n_; ++s)
      for (const Edge &e : pks.edges[s])
        preds_[e.to].push_back(s);
  }

  std::vector<StateSet> run(const std::vector<const Formula *> &order, Mode mode) {
    std::vector<StateSet> sets(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      const Formula &f = *order[i];
      auto kid = [&](std::size_t k) -> const StateSet & {
        const Formula *p = f.kids.at(k).get();
        for (std::size_t j = i; j-- > 0;)
          if (order[j] == p)
            return sets[j];
        throw InternalError("subformula evaluated out of order");
      };
      sets[i] = eval(f, mode, kid);
    }
    return sets;
  }

private:
  StateSet literal(const std::string &atom, bool positive, Mode mode) const {
    auto it = std::find(pks_.label_names.begin(), pks_.label_names.end(), atom);
    if (it == pks_.label_names.end())
      throw FormulaError("unknown atom '" + atom + "' in property");
    const auto l = static_cast<std::size_t>(it - pks_.label_names.begin());
    StateSet out(n_);
    for (StateId s = 0; s < n_; ++s) {
      const TBit b = pks_.labels[s][l];
      if (b == TBit::Unknown) {
        if (mode == Mode::Exact)
          throw ContractViolation("label '" + atom + "' is unknown at state " +
                                  pks_.states[s].quoted());
        out[s] = mode == Mode::Optimistic;
      } else {
        out[s] = (b == TBit::One) == positive;
      }
    }
    return out;
  }

  StateSet complement(StateSet a) const {
    for (auto &c : a)
      c = !c;
    return a;
  }

  StateSet ex(const StateSet &a) const {
    StateSet out(n_);
    for (StateId s = 0; s < n_; ++s)
      for (const Edge &e : pks_.edges[s])
        if (a[e.to]) {
          out[s] = 1;
          break;
        }
    return out;
  }

  StateSet eu(const StateSet &a, const StateSet &b) const {
    StateSet out = b;
    std::vector<StateId> work;
    for (StateId s = 0; s < n_; ++s)
      if (b[s])
        work.push_back(s);
    while (!work.empty()) {
      const StateId t = work.back();
      work.pop_back();
      for (StateId p : preds_[t])
        if (!out[p] && a[p]) {
          out[p] = 1;
          work.push_back(p);
        }
    }
    return out;
  }

  StateSet eg(const StateSet &a) const {
    StateSet out = a;
    std::vector<std::size_t> live(n_, 0);
    std::vector<StateId> work;
    for (StateId s = 0; s < n_; ++s) {
      if (!out[s])
        continue;
      for (const Edge &e : pks_.edges[s])
        live[s] += out[e.to] ? 1 : 0;
      if (live[s] == 0)
        work.push_back(s);
    }
    while (!work.empty()) {
      const StateId t = work.back();
      work.pop_back();
      if (!out[t])
        continue;
      out[t] = 0;
      for (StateId p : preds_[t])
        if (out[p] && --live[p] == 0)
          work.push_back(p);
    }
    return out;
  }

  template <class Kid> StateSet eval(const Formula &f, Mode mode, Kid &&kid) {
    switch (f.kind) {
    case FKind::True:
      return StateSet(n_, 1);
    case FKind::False:
      return StateSet(n_, 0);
    case FKind::Atom:
      return literal(f.atom, true, mode);
    case FKind::Not:
      if (f.lhs().kind == FKind::Atom)
        return literal(f.lhs().atom, false, mode);
      if (mode != Mode::Exact)
        throw InternalError("completion run on a formula outside negation normal form");
      return complement(kid(0));
    case FKind::And: {
      StateSet out = kid(0);
      const StateSet &b = kid(1);
      for (std::size_t s = 0; s < n_; ++s)
        out[s] = out[s] && b[s];
      return out;
    }
    case FKind::Or: {
      StateSet out = kid(0);
      const StateSet &b = kid(1);
      for (std::size_t s = 0; s < n_; ++s)
        out[s] = out[s] || b[s];
      return out;
    }
    case FKind::Implies: {
      StateSet out = complement(kid(0));
      const StateSet &b = kid(1);
      for (std::size_t s = 0; s < n_; ++s)
        out[s] = out[s] || b[s];
      return out;
    }
    case FKind::EX:
      return ex(kid(0));
    case FKind::AX:
      return complement(ex(complement(kid(0))));
    case FKind::EF:
      return eu(StateSet(n_, 1), kid(0));
    case FKind::AG:
      return complement(eu(StateSet(n_, 1), complement(kid(0))));
    case FKind::EG:
      return eg(kid(0));
    case FKind::AF:
      return complement(eg(complement(kid(0))));
    case FKind::EU:
      return eu(kid(0), kid(1));
    case FKind::AU: {
      // A[a U b] == !(E[!b U (!a & !b)] | EG !b)
      const StateSet nb = complement(kid(1));
      StateSet both = complement(kid(0));
      for (std::size_t s = 0; s < n_; ++s)
        both[s] = both[s] && nb[s];
      StateSet bad = eu(nb, both);
      const StateSet g = eg(nb);
      for (std::size_t s = 0; s < n_; ++s)
        bad[s] = bad[s] || g[s];
      return complement(std::move(bad));
    }
    }
    throw InternalError("unhandled formula kind");
  }

  const PKS &pks_;
  std::size_t n_;
  std::vector<std::vector<StateId>> preds_;
};

} // namespace

MC2Result model_check2(const PKS &ks, const FormulaPtr &phi) {
  check_atoms(*phi, ks.label_names);
  MC2Result r;
  post_order(*phi, r.subformulas);
  r.sets = Checker(ks).run(r.subformulas, Mode::Exact);
  r.value = r.sets.back().at(ks.initial) != 0;
  return r;
}

MC3Result model_check3(const PKS &pks, const FormulaPtr &phi) {
  check_atoms(*phi, pks.label_names);
  MC3Result r;
  Labelling &lab = r.labelling;
  lab.nnf = normalize_nnf(phi);
  post_order(*lab.nnf, lab.subformulas);
  Checker checker(pks);
  lab.pessimistic = checker.run(lab.subformulas, Mode::Pessimistic);
  lab.optimistic = checker.run(lab.subformulas, Mode::Optimistic);
  r.value = lab.value(pks.initial, lab.root());
  return r;
}

} // namespace tvar
