#include "cli_runner.hpp"
#include "support.hpp"

#include "tvar/errors.hpp"
#include "tvar/oracle.hpp"
#include "tvar/refine.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

using namespace tvar;
using tvar::test::run_cli;

namespace {

constexpr std::size_t kConcreteCap = std::size_t{1} << 14;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string &why) {
    if (pass)
      detail.str("");
    if (!pass)
      detail << "; ";
    pass = false;
    detail << why;
  }
};

/// Bookkeeping shared by the run-level criteria: every verification run of
/// criteria 1 to 5 goes through `audited_run`.
struct Tally {
  std::size_t runs = 0;
  std::size_t modal_checks = 0;
  std::size_t modal_failures = 0;
  std::size_t unaudited_runs = 0;
  std::size_t limit_hits = 0;
  std::size_t bound_violations = 0;
  std::size_t max_refinements = 0;
  std::vector<std::string> witnesses;

  void note(const std::string &w) {
    if (witnesses.size() < 5)
      witnesses.push_back(w);
  }
};

Tally tally;

VerifyOutcome audited_run(const std::shared_ptr<const SystemIR> &ir, const FormulaPtr &phi,
                          Strategy st, const PKS *ks, const std::string &id,
                          std::function<void(const IterationView &)> extra = {}) {
  VerifyOptions opts;
  opts.on_iteration = [&](const IterationView &v) {
    if (ks) {
      ++tally.modal_checks;
      const AuditReport rep = check_modal_simulation(*ks, v.pks);
      if (!rep.passed()) {
        ++tally.modal_failures;
        tally.note("modal " + id + " iteration " + std::to_string(v.iteration) + ": " +
                   rep.violations.front().condition + " " + rep.violations.front().witness);
      }
    }
    if (extra)
      extra(v);
  };
  const VerifyOutcome r = verify_loop(ir, phi, st, opts);
  ++tally.runs;
  if (!ks)
    ++tally.unaudited_runs;
  tally.max_refinements = std::max(tally.max_refinements, r.stats.refinements);
  if (r.limit_hit) {
    ++tally.limit_hits;
    tally.note("limit " + id + ": " + r.limit_reason);
  }
  const std::size_t bound =
      (ir->state_width() + ir->input_width()) * r.stats.raised_states;
  if (r.stats.refinements > bound) {
    ++tally.bound_violations;
    tally.note("bound " + id + ": " + std::to_string(r.stats.refinements) + " > " +
               std::to_string(bound));
  }
  return r;
}

std::optional<PKS> concrete_or_none(const SystemIR &ir) {
  try {
    return build_concrete_ks(ir, kConcreteCap);
  } catch (const ResourceLimit &) {
    return std::nullopt;
  }
}

std::string strategy_name(Strategy s) { return std::string(to_string(s)); }

// ---------------------------------------------------------------------------

Verdict criterion1() {
  Verdict v;
  const auto ir = test::landing_gear();
  const PKS ks = build_concrete_ks(*ir, kConcreteCap);
  const std::pair<const char *, const char *> cases[] = {{"EF(AG(msb))", "true"},
                                                         {"AG(EF(!msb))", "false"}};
  double worst = 0;
  for (Strategy st : {Strategy::Naive, Strategy::Input, Strategy::Decay})
    for (const auto &[prop, expected] : cases) {
      const auto t0 = Clock::now();
      const auto r = run_cli({"verify", "--benchmark", "landing-gear", "--property", prop,
                              "--strategy", strategy_name(st)});
      const double dt = seconds_since(t0);
      worst = std::max(worst, dt);
      const std::string line = r.out.substr(0, r.out.find('\n'));
      if (line != std::string("result: ") + expected)
        v.fail(strategy_name(st) + " " + prop + " gave '" + line + "'");
      if (dt >= 1.0)
        v.fail(strategy_name(st) + " " + prop + " took " + std::to_string(dt) + " s");
      audited_run(ir, parse_formula(prop), st, &ks, std::string("landing-gear ") + prop);
    }
  if (v.pass)
    v.detail << "6 runs correct, slowest " << std::fixed << std::setprecision(3) << worst << " s";
  return v;
}

Verdict criterion2() {
  Verdict v;
  const auto ir = test::landing_gear();
  const PKS ks = build_concrete_ks(*ir, kConcreteCap);
  const AbstractGA aga = make_ga(ir, Strategy::Input);
  const PKS initial = build_pks(aga);
  const std::set<std::string> fig3a_states = {"000", "0X1", "X1X", "XXX"};
  if (test::state_strings(initial) != fig3a_states || initial.transition_count() != 4)
    v.fail("initial structure differs");
  const RefineResult r =
      refine_strict(aga, {{CandidateKind::InputBit, TBitVec::parse("000"), 0, 0}}, initial);
  const std::set<std::string> fig4a_states = {"000", "001", "011", "010", "111", "X10", "10X"};
  const std::set<std::pair<std::string, std::string>> fig4a_edges = {
      {"000", "001"}, {"001", "010"}, {"010", "X10"}, {"X10", "X10"},
      {"000", "011"}, {"011", "111"}, {"111", "10X"}, {"10X", "10X"}};
  if (test::state_strings(r.pks) != fig4a_states)
    v.fail("refined states differ");
  if (test::edge_strings(r.pks) != fig4a_edges || r.pks.transition_count() != 8)
    v.fail("refined transitions differ");
  for (const PKS *p : {&initial, &r.pks}) {
    ++tally.modal_checks;
    if (!check_modal_simulation(ks, *p).passed()) {
      ++tally.modal_failures;
      tally.note("modal figure structure");
    }
  }
  if (v.pass)
    v.detail << "4 states / 4 transitions, then 7 states / 8 transitions";
  return v;
}

Verdict criterion3() {
  Verdict v;
  std::size_t runs = 0;
  for (const auto &entry : test::corpus()) {
    const auto ir = test::load_corpus(entry.file);
    const auto ks = concrete_or_none(*ir);
    if (!ks) {
      v.fail(entry.file + " has no concrete structure under the cap");
      continue;
    }
    for (const auto &prop : entry.properties) {
      const VerifyOutcome r =
          audited_run(ir, parse_formula(prop), Strategy::Naive, &*ks, entry.file + " " + prop);
      ++runs;
      if (r.stats.refinements != 0)
        v.fail(entry.file + " " + prop + " needed refinements");
      if (r.pks.has_unknown_labels())
        v.fail(entry.file + " has unknown labels");
      if (!structurally_equal(r.pks, *ks))
        v.fail(entry.file + " differs from the concrete structure");
      if (r.result == ThreeValued::Unknown ||
          (r.result == ThreeValued::True) != model_check2(*ks, parse_formula(prop)).value)
        v.fail(entry.file + " " + prop + " wrong verdict");
    }
  }
  if (v.pass)
    v.detail << runs << " naive runs over " << test::corpus().size()
             << " systems, all concrete and refinement-free";
  return v;
}

Verdict criterion4() {
  Verdict v;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240);
  std::size_t systems = 0, decided = 0, undecided = 0, mismatches = 0, runs = 0;
  while (systems < 200) {
    const auto ir = std::make_shared<const SystemIR>(parse_system(test::random_system_text(rng)));
    const auto ks = concrete_or_none(*ir);
    ++systems;
    if (!ks) {
      v.fail("random#" + std::to_string(systems) + " exceeds the concrete cap");
      continue;
    }
    for (int k = 0; k < 20; ++k) {
      const FormulaPtr f = test::random_formula(rng, test::label_names(*ir), 4);
      const bool truth = model_check2(*ks, f).value;
      for (Strategy st : {Strategy::Naive, Strategy::Input, Strategy::Decay}) {
        const std::string id = "random#" + std::to_string(systems) + " " + to_string(*f) + " " +
                               strategy_name(st);
        const VerifyOutcome r = audited_run(ir, f, st, ks ? &*ks : nullptr, id);
        ++runs;
        if (r.result == ThreeValued::Unknown) {
          ++undecided;
          continue;
        }
        ++decided;
        if ((r.result == ThreeValued::True) != truth) {
          ++mismatches;
          v.fail(id + " disagrees with the concrete verdict");
        }
      }
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= 600)
    v.fail("took " + std::to_string(dt) + " s");
  if (v.pass)
    v.detail << systems << " systems x 20 formulas x 3 strategies: " << decided << "/" << runs
             << " decided, 0 mismatches, " << undecided << " unknown, " << std::fixed
             << std::setprecision(1) << dt << " s";
  return v;
}

Verdict criterion5() {
  Verdict v;
  std::mt19937_64 rng(5150);
  std::size_t evaluations = 0, runs = 0;
  for (int n = 0; n < 50; ++n) {
    const auto ir = std::make_shared<const SystemIR>(parse_system(test::random_system_text(rng)));
    const auto ks = concrete_or_none(*ir);
    std::vector<FormulaPtr> pool;
    for (int k = 0; k < 10; ++k)
      pool.push_back(test::random_formula(rng, test::label_names(*ir), 4));
    for (Strategy st : {Strategy::Input, Strategy::Decay})
      for (const FormulaPtr &driver : pool) {
        std::vector<ThreeValued> seen(pool.size(), ThreeValued::Unknown);
        const std::string id = "monotonicity#" + std::to_string(n) + " " + strategy_name(st);
        audited_run(ir, driver, st, ks ? &*ks : nullptr, id, [&](const IterationView &view) {
          for (std::size_t i = 0; i < pool.size(); ++i) {
            const ThreeValued now = model_check3(view.pks, pool[i]).value;
            ++evaluations;
            if (seen[i] != ThreeValued::Unknown && now != seen[i])
              v.fail(id + " formula " + to_string(*pool[i]) + " went from " +
                     std::string(to_string(seen[i])) + " to " + std::string(to_string(now)) +
                     " at iteration " + std::to_string(view.iteration));
            if (now != ThreeValued::Unknown)
              seen[i] = now;
          }
        });
        ++runs;
      }
  }
  if (v.pass)
    v.detail << "50 systems, " << runs << " runs, " << evaluations
             << " pool evaluations without reversal";
  return v;
}

Verdict criterion6() {
  Verdict v;
  if (tally.modal_failures != 0)
    v.fail(std::to_string(tally.modal_failures) + " of " + std::to_string(tally.modal_checks) +
           " iterations failed: " + (tally.witnesses.empty() ? "" : tally.witnesses.front()));
  if (tally.unaudited_runs != 0)
    v.fail(std::to_string(tally.unaudited_runs) + " runs had no concrete structure under 2^14");

  const auto ir = test::landing_gear();
  const PKS ks = build_concrete_ks(*ir, kConcreteCap);
  AbstractGA aga = make_ga(ir, Strategy::Input);
  aga.pq.raise(TBitVec::parse("000"), 0);
  const PKS fig4a = build_pks(aga);
  auto id = [&](const char *s) { return *fig4a.find(TBitVec::parse(s)); };

  PKS missing = fig4a;
  missing.remove_transition(id("011"), id("111"));
  PKS extra = fig4a;
  extra.add_transition(id("000"), id("10X"), TBitVec::parse("X"));
  PKS relabelled = fig4a;
  relabelled.labels[id("111")][0] = TBit::Zero;
  const std::pair<const PKS *, const char *> mutants[] = {
      {&missing, "12b"}, {&extra, "12c"}, {&relabelled, "12a"}};
  std::size_t caught = 0;
  for (const auto &[p, cond] : mutants) {
    if (check_modal_simulation(ks, *p).has(cond))
      ++caught;
    else
      v.fail(std::string("mutant for ") + cond + " not detected");
  }
  if (v.pass)
    v.detail << tally.modal_checks << "/" << tally.modal_checks << " iterations over "
             << tally.runs << " runs pass, " << caught << "/3 mutants detected";
  return v;
}

Verdict criterion7() {
  Verdict v;
  if (tally.limit_hits != 0)
    v.fail(std::to_string(tally.limit_hits) + " runs hit a limit: " + tally.witnesses.front());
  if (tally.bound_violations != 0)
    v.fail(std::to_string(tally.bound_violations) + " runs exceeded the raise bound");
  if (v.pass)
    v.detail << tally.runs << " runs terminated within the bound, at most "
             << tally.max_refinements << " refinements";
  return v;
}

struct Row {
  unsigned v, u, c;
  std::string result;
  std::size_t refinements, states_final;
};

std::vector<Row> sweep(const std::string &grid, const std::string &strategy, double *seconds) {
  const auto t0 = Clock::now();
  const auto r = run_cli({"sweep", "--grid", grid, "--strategies", strategy, "--max-states",
                          std::to_string(kConcreteCap)});
  *seconds = seconds_since(t0);
  std::vector<Row> rows;
  if (r.code != 0)
    return rows;
  const auto csv = test::parse_csv(r.out);
  for (std::size_t i = 1; i < csv.size(); ++i)
    rows.push_back({static_cast<unsigned>(std::stoul(csv[i][1])),
                    static_cast<unsigned>(std::stoul(csv[i][2])),
                    static_cast<unsigned>(std::stoul(csv[i][3])), csv[i][5],
                    std::stoul(csv[i][6]), std::stoul(csv[i][8])});
  return rows;
}

Verdict criterion8() {
  Verdict v;
  std::ostringstream summary;
  auto constant = [&](const std::vector<Row> &rows, const char *what) {
    if (rows.size() != 4) {
      v.fail(std::string(what) + ": expected 4 rows");
      return;
    }
    for (const Row &r : rows) {
      if (r.result != "true")
        v.fail(std::string(what) + ": result " + r.result);
      if (r.states_final != rows[0].states_final || r.refinements != rows[0].refinements)
        v.fail(std::string(what) + ": not constant");
    }
    summary << what << " states_final=" << rows[0].states_final
            << " refinements=" << rows[0].refinements << "; ";
  };

  double t_input = 0, t_naive = 0, t_decay = 0;
  const auto input = sweep("V=4;U=2,6,10,14;C=2", "input", &t_input);
  constant(input, "input over U");

  const auto naive = sweep("V=4;U=2,6,10,14;C=2", "naive", &t_naive);
  std::vector<Row> complete;
  for (const Row &r : naive)
    if (r.result != "unknown")
      complete.push_back(r);
  if (complete.size() < 2)
    v.fail("naive completed on fewer than two grid points");
  for (std::size_t i = 1; i < complete.size(); ++i) {
    const double need = std::pow(2.0, complete[i].u - complete[i - 1].u);
    if (static_cast<double>(complete[i].states_final) <
        need * static_cast<double>(complete[i - 1].states_final))
      v.fail("naive growth below 2x per bit between U=" + std::to_string(complete[i - 1].u) +
             " and U=" + std::to_string(complete[i].u));
  }
  summary << "naive states_final";
  for (const Row &r : naive)
    summary << " U=" << r.u << ":" << (r.result == "unknown" ? "cap" : std::to_string(r.states_final));
  summary << "; ";

  const auto decay = sweep("V=4;U=2;C=2,6,10,14", "decay", &t_decay);
  constant(decay, "decay over C");

  for (const auto &[t, name] : {std::pair{t_input, "input"}, {t_naive, "naive"}, {t_decay, "decay"}})
    if (t >= 60)
      v.fail(std::string(name) + " grid took " + std::to_string(t) + " s");
  summary << std::fixed << std::setprecision(1) << "grids " << t_input << "/" << t_naive << "/"
          << t_decay << " s";
  if (v.pass)
    v.detail << summary.str();
  return v;
}

Verdict criterion9() {
  Verdict v;
  std::size_t checked = 0;
  for (const auto &entry : test::corpus()) {
    const auto ir = test::load_corpus(entry.file);
    if (ir->state_width() + ir->input_width() > 12)
      continue;
    const AbstractGA full = make_full_precision_ga(ir);
    Sampler sampler;
    sampler.mode = Sampler::Mode::Exhaustive;
    sampler.max_states = kConcreteCap;
    sampler.max_concretizations = 1 << 12;
    const AuditReport rep = audit_terminating(full, sampler);
    if (!rep.passed())
      v.fail(entry.file + ": " + rep.violations.front().condition + " " +
             rep.violations.front().witness);
    if (!structurally_equal(build_pks(full), build_concrete_ks(*ir, kConcreteCap)))
      v.fail(entry.file + ": structure differs from the concrete one");
    ++checked;
  }
  if (checked == 0)
    v.fail("no corpus system small enough");
  if (v.pass)
    v.detail << checked << " corpus systems pass and match their concrete structures";
  return v;
}

} // namespace

int main() {
  const std::pair<int, std::function<Verdict()>> criteria[] = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}};
  int failures = 0;
  for (const auto &[n, run] : criteria) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception &e) {
      v.fail(std::string("exception: ") + e.what());
    }
    failures += !v.pass;
    std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << " (" << std::fixed
              << std::setprecision(1) << seconds_since(t0) << " s) " << v.detail.str()
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
