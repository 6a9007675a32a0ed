#include "support.hpp"

#include "tvar/errors.hpp"
#include "tvar/oracle.hpp"
#include "tvar/statespace.hpp"

#include <doctest.h>

#include <deque>

using namespace tvar;
using tvar::test::edge_strings;
using tvar::test::landing_gear;
using tvar::test::state_strings;

namespace {

TBitVec V(const char *s) { return TBitVec::parse(s); }

using EdgeSet = std::set<std::pair<std::string, std::string>>;

const EdgeSet kFig3a = {{"000", "0X1"}, {"0X1", "X1X"}, {"X1X", "XXX"}, {"XXX", "XXX"}};
const EdgeSet kFig4a = {{"000", "001"}, {"001", "010"}, {"010", "X10"}, {"X10", "X10"},
                        {"000", "011"}, {"011", "111"}, {"111", "10X"}, {"10X", "10X"}};

std::size_t count(const std::string &text, const std::string &needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1))
    ++n;
  return n;
}

/// Independent reachability over the generating automaton.
EdgeSet reference_edges(const AbstractGA &aga) {
  EdgeSet edges;
  std::set<std::string> seen;
  std::deque<TBitVec> work{initial_abstract_state(aga)};
  seen.insert(work.front().str());
  while (!work.empty()) {
    const TBitVec s = work.front();
    work.pop_front();
    for (const TBitVec &q : qualified_inputs(aga, s)) {
      const TBitVec t = abstract_step(aga, s, q);
      edges.insert({s.str(), t.str()});
      if (seen.insert(t.str()).second)
        work.push_back(t);
    }
  }
  return edges;
}

void check_faithful(const AbstractGA &aga, const PKS &pks) {
  REQUIRE(edge_strings(pks) == reference_edges(aga));
  REQUIRE(pks.states[pks.initial] == initial_abstract_state(aga));
  for (StateId s = 0; s < pks.states.size(); ++s) {
    REQUIRE(pks.labels[s] == abstract_labels(aga.system(), pks.states[s]));
    for (const Edge &e : pks.edges[s])
      REQUIRE(abstract_step(aga, pks.states[s], e.via) == pks.states[e.to]);
  }
}

} // namespace

TEST_CASE("input strategy initial state space") {
  const PKS pks = build_pks(make_ga(landing_gear(), Strategy::Input));
  CHECK(state_strings(pks) == std::set<std::string>{"000", "0X1", "X1X", "XXX"});
  CHECK(edge_strings(pks) == kFig3a);
  CHECK(pks.transition_count() == 4);
  CHECK(pks.states[pks.initial] == V("000"));
}

TEST_CASE("splitting the input after the initial state") {
  AbstractGA aga = make_ga(landing_gear(), Strategy::Input);
  const PKS before = build_pks(aga);
  aga.pq.raise(V("000"), 0);
  BuildStats stats;
  const PKS pks = build_pks(aga, &before, {}, &stats);
  CHECK(state_strings(pks) ==
        std::set<std::string>{"000", "001", "011", "010", "111", "X10", "10X"});
  CHECK(edge_strings(pks) == kFig4a);
  CHECK(pks.transition_count() == 8);
  CHECK(stats.states_generated == 6);
  CHECK(structurally_equal(pks, build_pks(aga)));
}

TEST_CASE("naive strategy reproduces the concrete structure") {
  const PKS pks = build_pks(make_ga(landing_gear(), Strategy::Naive));
  CHECK(pks.states.size() == 8);
  CHECK(pks.transition_count() == 12);
  CHECK_FALSE(pks.has_unknown_labels());
  for (const auto &s : pks.states)
    CHECK(s.is_concrete());
  CHECK(structurally_equal(pks, build_concrete_ks(*landing_gear(), 1000)));
}

TEST_CASE("state limit") {
  BuildLimits limits;
  limits.max_states = 5;
  CHECK_THROWS_AS(build_pks(make_ga(landing_gear(), Strategy::Naive), nullptr, limits),
                  ResourceLimit);
  limits.max_states = 8;
  CHECK_NOTHROW(build_pks(make_ga(landing_gear(), Strategy::Naive), nullptr, limits));
}

TEST_CASE("dot export") {
  const PKS fig3a = build_pks(make_ga(landing_gear(), Strategy::Input));
  const std::string dot = export_dot(fig3a);
  CHECK(dot.rfind("digraph", 0) == 0);
  CHECK(count(dot, " -> ") == 4);
  CHECK(count(dot, "msb=") == 4);
  CHECK(dot.find("\"XXX\" [msb=\"⊥\"") != std::string::npos);
  CHECK(dot.find("\"000\" [msb=\"0\"") != std::string::npos);

  const auto loop = std::make_shared<const SystemIR>(
      parse_system("system loop\nstate a: bv[1] init 0\nnext a = a\n"));
  const std::string single = export_dot(build_pks(make_ga(loop, Strategy::Input)));
  CHECK(count(single, " -> ") == 1);
  CHECK(count(single, "\"0\" [peripheries=2, style=filled") == 1);
  CHECK(single.find("\"0\" -> \"0\"") != std::string::npos);
}

TEST_CASE("structure matches the generating automaton") {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 60; ++n) {
    const auto ir = std::make_shared<const SystemIR>(parse_system(test::random_system_text(rng)));
    for (Strategy st : {Strategy::Naive, Strategy::Input, Strategy::Decay}) {
      const AbstractGA aga = make_ga(ir, st);
      const PKS pks = build_pks(aga);
      check_faithful(aga, pks);
      REQUIRE(structurally_equal(pks, build_pks(aga)));
    }
  }
}

TEST_CASE("incremental rebuilds equal fresh builds") {
  std::mt19937_64 rng(6);
  for (int n = 0; n < 40; ++n) {
    const auto ir = std::make_shared<const SystemIR>(parse_system(test::random_system_text(rng)));
    for (Strategy st : {Strategy::Input, Strategy::Decay}) {
      AbstractGA aga = make_ga(ir, st);
      PKS pks = build_pks(aga);
      for (int r = 0; r < 12; ++r) {
        const TBitVec &s = pks.states[rng() % pks.states.size()];
        const bool step = ir->input_width() == 0 || rng() % 2 == 0;
        if (step)
          aga.pf.raise(s, static_cast<unsigned>(rng() % ir->state_width()));
        else
          aga.pq.raise(s, static_cast<unsigned>(rng() % ir->input_width()));
        PKS next = build_pks(aga, &pks);
        REQUIRE(structurally_equal(next, build_pks(aga)));
        check_faithful(aga, next);
        pks = std::move(next);
      }
    }
  }
}

TEST_CASE("relation comparison ignores vias") {
  AbstractGA aga = make_ga(landing_gear(), Strategy::Input);
  const PKS a = build_pks(aga);
  PKS b = a;
  CHECK(same_relation(a, b));
  b.remove_transition(*b.find(V("XXX")), *b.find(V("XXX")));
  CHECK_FALSE(same_relation(a, b));
  CHECK_FALSE(b.has_transition(*b.find(V("XXX")), *b.find(V("XXX"))));
}
