#include "cli.hpp"

#include "tvar/errors.hpp"
#include "tvar/oracle.hpp"
#include "tvar/refine.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace tvar::cli {

namespace {

using nlohmann::json;

constexpr std::size_t kAuditCap = std::size_t{1} << 14;

/// Raised for bad flag values after CLI11 parsing succeeded.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SystemSource {
  std::string file;
  std::string benchmark;

  void attach(CLI::App *cmd) {
    auto *f = cmd->add_option("--system", file, "System description file (.msys)");
    auto *b = cmd->add_option("--benchmark", benchmark,
                              "Built-in system: landing-gear, recoverable:V,U,C or "
                              "nonrecoverable:V,U,C");
    f->excludes(b);
  }

  std::string id() const { return file.empty() ? benchmark : file; }
};

unsigned parse_positive(std::string_view text, const std::string &what) {
  unsigned v = 0;
  const auto *end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end || v == 0)
    throw UsageError("invalid " + what + " '" + std::string(text) + "'");
  return v;
}

struct BenchmarkSpec {
  BenchmarkKind kind;
  unsigned v = 0, u = 0, c = 0;
};

BenchmarkSpec parse_benchmark_spec(const std::string &text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  auto kind = parse_benchmark_kind(name);
  if (!kind)
    throw UsageError("unknown benchmark '" + name + "'");
  BenchmarkSpec spec{*kind};
  if (*kind == BenchmarkKind::LandingGear)
    return spec;
  if (colon == std::string::npos)
    throw UsageError("benchmark '" + name + "' needs parameters, e.g. " + name + ":4,2,2");
  std::vector<unsigned> params;
  std::stringstream ss(text.substr(colon + 1));
  for (std::string part; std::getline(ss, part, ',');)
    params.push_back(parse_positive(part, "benchmark parameter"));
  if (params.size() != 3)
    throw UsageError("benchmark '" + name + "' takes three parameters V,U,C");
  spec.v = params[0];
  spec.u = params[1];
  spec.c = params[2];
  return spec;
}

std::shared_ptr<const SystemIR> load(const SystemSource &src) {
  if (!src.file.empty()) {
    std::ifstream in(src.file);
    if (!in)
      throw UsageError("cannot open system file '" + src.file + "'");
    std::ostringstream text;
    text << in.rdbuf();
    try {
      return std::make_shared<const SystemIR>(parse_system(text.str()));
    } catch (const ParseError &e) {
      throw UsageError(src.file + ":" + e.what());
    }
  }
  if (src.benchmark.empty())
    throw UsageError("one of --system or --benchmark is required");
  const BenchmarkSpec spec = parse_benchmark_spec(src.benchmark);
  if (spec.v + spec.u + spec.c > kMaxWidth)
    throw UsageError("benchmark parameters exceed " + std::to_string(kMaxWidth) + " state bits");
  return std::make_shared<const SystemIR>(generate_benchmark(spec.kind, spec.v, spec.u, spec.c));
}

Strategy strategy_from(const std::string &text) {
  auto s = parse_strategy(text);
  if (!s)
    throw UsageError("unknown strategy '" + text + "'");
  return *s;
}

FormulaPtr property_from(const std::string &text, const SystemIR &ir) {
  try {
    FormulaPtr phi = parse_formula(text);
    std::vector<std::string> names;
    for (const auto &l : ir.labels())
      names.push_back(l.name);
    check_atoms(*phi, names);
    return phi;
  } catch (const FormulaError &e) {
    throw UsageError(e.what());
  }
}

std::string bits_text(BitMask m, unsigned width) {
  return width == 0 ? std::string() : TBitVec::constant(width, m).str();
}

json precision_json(const AbstractGA &aga) {
  json out = json::array();
  std::vector<TBitVec> states;
  for (const auto &e : aga.pq.overrides())
    states.push_back(e.state);
  for (const auto &e : aga.pf.overrides())
    if (std::find(states.begin(), states.end(), e.state) == states.end())
      states.push_back(e.state);
  for (const auto &s : states)
    out.push_back({{"state", s.str()},
                   {"pq", bits_text(aga.pq.own_mask(s), aga.pq.width())},
                   {"pf", bits_text(aga.pf.own_mask(s), aga.pf.width())}});
  return out;
}

double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

std::string fixed3(double x) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << x;
  return os.str();
}

int exit_for(ThreeValued v) {
  switch (v) {
  case ThreeValued::True:
    return kTrue;
  case ThreeValued::False:
    return kFalse;
  case ThreeValued::Unknown:
    return kUnknown;
  }
  return kUnknown;
}

struct LimitFlags {
  std::size_t max_refinements = 10000;
  std::size_t max_states = 1000000;
  double timeout = 0;

  void attach(CLI::App *cmd) {
    cmd->add_option("--max-refinements", max_refinements, "Refinement limit")
        ->capture_default_str();
    cmd->add_option("--max-states", max_states, "Abstract state limit per build (0: none)")
        ->capture_default_str();
    cmd->add_option("--timeout", timeout, "Wall-clock limit in seconds (0: none)")
        ->check(CLI::NonNegativeNumber);
  }

  VerifyLimits limits() const { return {max_refinements, max_states, timeout}; }
};

struct FaultFlag {
  std::string name;

  void attach(CLI::App *cmd) {
    cmd->add_option("--inject-fault", name,
                    "Deliberate defect for audit testing (test builds only)");
  }

  Fault fault() const {
    if (name.empty())
      return Fault::None;
#ifdef TVAR_FAULT_INJECTION
    auto f = parse_fault(name);
    if (!f)
      throw UsageError("unknown fault '" + name + "'");
    return *f;
#else
    throw UsageError("--inject-fault is only available in test builds");
#endif
  }
};

std::ofstream open_output(const std::string &path) {
  std::ofstream f(path);
  if (!f)
    throw UsageError("cannot write '" + path + "'");
  return f;
}

// ---------------------------------------------------------------------------

struct VerifyCmd {
  SystemSource source;
  std::string property;
  std::string strategy = "input";
  LimitFlags limits;
  FaultFlag fault;
  std::string stats_file;
  std::string trace_file;

  void attach(CLI::App *cmd) {
    source.attach(cmd);
    cmd->add_option("--property", property, "CTL property")->required();
    cmd->add_option("--strategy", strategy, "naive, input or decay")->capture_default_str();
    limits.attach(cmd);
    fault.attach(cmd);
    cmd->add_option("--stats", stats_file, "Write run statistics as JSON");
    cmd->add_option("--trace", trace_file, "Write one JSON line per precision raise");
  }

  int run(std::ostream &out) const {
    auto ir = load(source);
    const FormulaPtr phi = property_from(property, *ir);
    const Strategy st = strategy_from(strategy);
    VerifyOptions opts;
    opts.limits = limits.limits();
    opts.fault = fault.fault();
    std::ofstream trace;
    if (!trace_file.empty()) {
      trace = open_output(trace_file);
      opts.on_raise = [&](const RaiseEvent &e) {
        trace << json{{"iteration", e.iteration},
                      {"kind", to_string(e.kind)},
                      {"state", e.state.str()},
                      {"bit", e.bit},
                      {"r_changed", e.r_changed}}
                     .dump()
              << '\n';
      };
    }
    const VerifyOutcome r = verify_loop(ir, phi, st, opts);
    out << "result: " << to_string(r.result) << '\n';
    out << "refinements: " << r.stats.refinements << ", states: " << r.stats.states_final
        << " final / " << r.stats.states_total << " total, transitions: "
        << r.stats.transitions_final << " final / " << r.stats.transitions_total
        << " total, time: " << fixed3(r.stats.wall_time_s) << " s\n";
    if (r.limit_hit)
      out << "limit: " << r.limit_reason << '\n';
    if (!stats_file.empty()) {
      json j = {{"system", source.id()},
                {"property", property},
                {"strategy", to_string(st)},
                {"result", to_string(r.result)},
                {"refinements", r.stats.refinements},
                {"states_total", r.stats.states_total},
                {"states_final", r.stats.states_final},
                {"transitions_total", r.stats.transitions_total},
                {"transitions_final", r.stats.transitions_final},
                {"wall_time_s", round3(r.stats.wall_time_s)},
                {"limit_hit", r.limit_hit},
                {"limit_reason", r.limit_reason},
                {"precision", precision_json(r.aga)}};
      open_output(stats_file) << j.dump(2) << '\n';
    }
    return exit_for(r.result);
  }
};

// ---------------------------------------------------------------------------

struct GridPoint {
  BenchmarkKind kind;
  unsigned v, u, c;
  Strategy strategy;
};

std::vector<unsigned> parse_values(const std::string &text) {
  std::vector<unsigned> out;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');)
    out.push_back(parse_positive(part, "grid value"));
  if (out.empty() || text.back() == ',')
    throw UsageError("empty value list in grid");
  return out;
}

struct SweepCmd {
  std::string grid;
  std::vector<std::string> kinds{"recoverable"};
  std::vector<std::string> strategies{"input"};
  std::string property = "AG(EF(v_zero))";
  std::string csv_file;
  LimitFlags limits;
  unsigned jobs = 1;

  void attach(CLI::App *cmd) {
    cmd->add_option("--grid", grid, "Parameter grid, e.g. \"V=2,4;U=2,6,10;C=2\"")->required();
    cmd->add_option("--kinds", kinds, "recoverable and/or nonrecoverable")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--strategies", strategies, "Strategies to run")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--property", property, "CTL property")->capture_default_str();
    cmd->add_option("--csv", csv_file, "Output CSV file (default: standard output)");
    limits.attach(cmd);
    cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  }

  std::vector<GridPoint> points() const {
    std::vector<unsigned> vs{1}, us{1}, cs{1};
    std::vector<GridPoint> out;
    if (grid.find_first_not_of(" \t") == std::string::npos)
      return out;
    bool seen[3] = {false, false, false};
    std::stringstream ss(grid);
    for (std::string seg; std::getline(ss, seg, ';');) {
      seg.erase(std::remove_if(seg.begin(), seg.end(), ::isspace), seg.end());
      const auto eq = seg.find('=');
      if (eq == std::string::npos || eq != 1)
        throw UsageError("malformed grid segment '" + seg + "'");
      const std::string name = seg.substr(0, 1);
      const int idx = name == "V" ? 0 : name == "U" ? 1 : name == "C" ? 2 : -1;
      if (idx < 0)
        throw UsageError("unknown grid parameter '" + name + "'");
      if (seen[idx])
        throw UsageError("grid parameter '" + name + "' given twice");
      seen[idx] = true;
      (idx == 0 ? vs : idx == 1 ? us : cs) = parse_values(seg.substr(2));
    }
    std::vector<BenchmarkKind> ks;
    for (const auto &k : kinds) {
      auto kind = parse_benchmark_kind(k);
      if (!kind || *kind == BenchmarkKind::LandingGear)
        throw UsageError("sweep kind must be recoverable or nonrecoverable, got '" + k + "'");
      ks.push_back(*kind);
    }
    std::vector<Strategy> sts;
    for (const auto &s : strategies)
      sts.push_back(strategy_from(s));
    for (auto k : ks)
      for (unsigned v : vs)
        for (unsigned u : us)
          for (unsigned c : cs) {
            if (v + u + c > kMaxWidth || v + u + 1 > kMaxWidth)
              throw UsageError("grid point exceeds " + std::to_string(kMaxWidth) + " bits");
            for (auto s : sts)
              out.push_back({k, v, u, c, s});
          }
    return out;
  }

  int run(std::ostream &out) const {
    const auto pts = points();
    {
      // Validate the property against the benchmark labels up front.
      auto probe = generate_benchmark(BenchmarkKind::Recoverable, 1, 1, 1);
      property_from(property, probe);
    }
    const FormulaPtr phi = parse_formula(property);
    std::vector<std::string> rows(pts.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < pts.size();) {
        const GridPoint &p = pts[i];
        auto ir = std::make_shared<const SystemIR>(generate_benchmark(p.kind, p.v, p.u, p.c));
        VerifyOptions opts;
        opts.limits = limits.limits();
        const VerifyOutcome r = verify_loop(ir, phi, p.strategy, opts);
        std::ostringstream row;
        row << to_string(p.kind) << ',' << p.v << ',' << p.u << ',' << p.c << ','
            << to_string(p.strategy) << ',' << to_string(r.result) << ',' << r.stats.refinements
            << ',' << r.stats.states_total << ',' << r.stats.states_final << ','
            << r.stats.transitions_total << ',' << r.stats.transitions_final << ','
            << fixed3(r.stats.wall_time_s);
        rows[i] = row.str();
      }
    };
    std::vector<std::thread> threads;
    for (unsigned t = 1; t < jobs && t < pts.size(); ++t)
      threads.emplace_back(worker);
    worker();
    for (auto &t : threads)
      t.join();

    std::ofstream file;
    if (!csv_file.empty())
      file = open_output(csv_file);
    std::ostream &csv = csv_file.empty() ? out : file;
    csv << "kind,V,U,C,strategy,result,refinements,states_total,states_final,"
           "transitions_total,transitions_final,wall_time_s\n";
    for (const auto &r : rows)
      csv << r << '\n';
    if (!csv_file.empty())
      out << "wrote " << rows.size() << " rows to " << csv_file << '\n';
    return kTrue;
  }
};

// ---------------------------------------------------------------------------

struct AuditCmd {
  SystemSource source;
  std::string property;
  std::string strategy = "input";
  std::string which = "all";
  LimitFlags limits;
  FaultFlag fault;
  std::string output;

  void attach(CLI::App *cmd) {
    source.attach(cmd);
    cmd->add_option("--property", property, "CTL property")->required();
    cmd->add_option("--strategy", strategy, "naive, input or decay")->capture_default_str();
    cmd->add_option("--audit", which, "soundness, modal, terminating or all")
        ->check(CLI::IsMember({"soundness", "modal", "terminating", "all"}))
        ->capture_default_str();
    limits.attach(cmd);
    fault.attach(cmd);
    cmd->add_option("--output", output, "Write the JSON report here (default: standard output)");
  }

  static json report_json(const AuditReport &rep, std::size_t checks) {
    json v = json::array();
    for (const auto &x : rep.violations)
      v.push_back({{"condition", x.condition}, {"witness", x.witness}});
    return {{"passed", rep.passed()}, {"checks", checks}, {"counts", rep.counts}, {"violations", v}};
  }

  int run(std::ostream &out, std::ostream &err) const {
    auto ir = load(source);
    const FormulaPtr phi = property_from(property, *ir);
    const Strategy st = strategy_from(strategy);
    const Fault f = fault.fault();
    const bool do_sound = which == "soundness" || which == "all";
    const bool do_modal = which == "modal" || which == "all";
    const bool do_term = which == "terminating" || which == "all";

    PKS ks;
    try {
      ks = build_concrete_ks(*ir, kAuditCap);
    } catch (const ResourceLimit &e) {
      err << "audit infeasible: " << e.what() << " (the audits need the concrete state space)\n";
      return kUnknown;
    }
    const bool concrete = model_check2(ks, phi).value;

    AuditReport sound, modal, term;
    std::size_t sound_checks = 0, modal_checks = 0, term_checks = 0;
    Sampler sampler;
    sampler.mode = Sampler::Mode::Reachable;
    sampler.max_states = kAuditCap;
    VerifyOptions opts;
    opts.limits = limits.limits();
    opts.fault = f;
    opts.on_iteration = [&](const IterationView &v) {
      if (do_sound) {
        AbstractGA aga = v.aga;
        sound.merge(audit_soundness(aga, sampler));
        ++sound_checks;
      }
      if (do_modal) {
        modal.merge(check_modal_simulation(ks, v.pks));
        ++modal_checks;
      }
    };
    const VerifyOutcome r = verify_loop(ir, phi, st, opts);
    if (do_term) {
      AbstractGA full = make_full_precision_ga(ir);
      full.fault = f;
      term.merge(audit_terminating(full, sampler));
      if (!structurally_equal(build_pks(full), ks))
        term.add("11", "full-precision structure differs from the concrete one");
      ++term_checks;
    }
    const bool agrees =
        r.result == ThreeValued::Unknown || (r.result == ThreeValued::True) == concrete;

    json audits = json::object();
    if (do_sound)
      audits["soundness"] = report_json(sound, sound_checks);
    if (do_modal)
      audits["modal"] = report_json(modal, modal_checks);
    if (do_term)
      audits["terminating"] = report_json(term, term_checks);
    const bool passed = sound.passed() && modal.passed() && term.passed() && agrees;
    json j = {{"system", source.id()},
              {"property", property},
              {"strategy", to_string(st)},
              {"fault", to_string(f)},
              {"result", to_string(r.result)},
              {"concrete_result", concrete},
              {"agrees_with_concrete", agrees},
              {"refinements", r.stats.refinements},
              {"audits", audits},
              {"passed", passed}};
    if (output.empty())
      out << j.dump(2) << '\n';
    else
      open_output(output) << j.dump(2) << '\n';
    return passed ? kTrue : kFalse;
  }
};

// ---------------------------------------------------------------------------

struct DumpCmd {
  SystemSource source;
  std::string property;
  std::string strategy = "input";
  std::size_t refinements = 0;
  std::size_t max_states = 1000000;
  std::string output;

  void attach(CLI::App *cmd) {
    source.attach(cmd);
    cmd->add_option("--property", property, "CTL property (needed when refining)");
    cmd->add_option("--strategy", strategy, "naive, input or decay")->capture_default_str();
    cmd->add_option("--refinements", refinements, "Stop after this many refinements")
        ->capture_default_str();
    cmd->add_option("--max-states", max_states, "Abstract state limit")->capture_default_str();
    cmd->add_option("--output", output, "DOT file (default: standard output)");
  }

  int run(std::ostream &out) const {
    auto ir = load(source);
    const Strategy st = strategy_from(strategy);
    PKS pks;
    if (refinements == 0) {
      BuildLimits bl;
      bl.max_states = max_states;
      try {
        pks = build_pks(make_ga(ir, st), nullptr, bl);
      } catch (const ResourceLimit &e) {
        throw UsageError(e.what());
      }
    } else {
      if (property.empty())
        throw UsageError("--property is required when --refinements is positive");
      const FormulaPtr phi = property_from(property, *ir);
      VerifyOptions opts;
      opts.limits.max_refinements = refinements;
      opts.limits.max_states = max_states;
      pks = verify_loop(ir, phi, st, opts).pks;
    }
    if (output.empty())
      out << export_dot(pks);
    else
      open_output(output) << export_dot(pks);
    return kTrue;
  }
};

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Three-valued abstraction refinement model checker"};
  app.require_subcommand(1);
  VerifyCmd verify;
  SweepCmd sweep;
  AuditCmd audit;
  DumpCmd dump;
  verify.attach(app.add_subcommand("verify", "Check a CTL property"));
  sweep.attach(app.add_subcommand("sweep", "Run a benchmark parameter grid and write CSV"));
  audit.attach(app.add_subcommand("audit", "Run soundness audits along a verification"));
  dump.attach(app.add_subcommand("dump", "Write the abstract state space as DOT"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kTrue;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kTrue;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (app.got_subcommand("verify"))
      return verify.run(out);
    if (app.got_subcommand("sweep"))
      return sweep.run(out);
    if (app.got_subcommand("audit"))
      return audit.run(out, err);
    return dump.run(out);
  } catch (const UsageError &e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError &e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const FormulaError &e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ContractViolation &e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

} // namespace tvar::cli
