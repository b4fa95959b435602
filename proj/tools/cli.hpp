#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spec_io.hpp"
#include "timecredit/algorithms/bundles.hpp"

namespace timecredit::cli {

enum Exit : int { kOk = 0, kCheckFailed = 1, kBadInput = 2 };

/// Rows of strings rendered as CSV or as a markdown table.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& os, const std::string& format) const {
    if (format == "markdown") {
      auto line = [&](const std::vector<std::string>& r) {
        os << "|";
        for (const auto& c : r) os << ' ' << c << " |";
        os << '\n';
      };
      line(header);
      os << "|";
      for (std::size_t i = 0; i < header.size(); ++i) os << "---|";
      os << '\n';
      for (const auto& r : rows) line(r);
      return;
    }
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
  }
};

inline std::string fixed(long double x, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << static_cast<double>(x);
  return os.str();
}

class BadInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// "name:index" -> defs with that literal decremented.
inline TimeDefs apply_fault(const TimeDefs& defs, const std::string& fault) {
  auto colon = fault.rfind(':');
  if (colon == std::string::npos) throw BadInput("fault must be written name:index");
  std::string fn = fault.substr(0, colon);
  std::size_t idx = 0;
  try {
    std::size_t used = 0;
    idx = std::stoul(fault.substr(colon + 1), &used);
    if (used != fault.size() - colon - 1) throw std::invalid_argument(fault);
  } catch (const std::exception&) {
    throw BadInput("fault index is not a natural: " + fault);
  }
  if (!defs.has(fn)) throw BadInput("no runtime function " + fn);
  try {
    return defs.with_fault(fn, idx);
  } catch (const std::out_of_range& e) {
    throw BadInput(e.what());
  }
}

/// Sends output to --out when given, else to the default stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw BadInput("cannot write " + path);
      os_ = &file_;
    }
  }
  std::ostream& get() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

struct Options {
  std::string algo, spec_path, scheme, format = "csv", out, fault;
  std::vector<std::uint64_t> sizes;
  unsigned trials = 1;
  std::uint64_t seed = 1;
  std::size_t ops = 10000;
  std::optional<unsigned> multiplier;
};

inline int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  auto b = algo::find_bundle(o.algo);
  if (!b) {
    err << "unknown algorithm: " << o.algo << "\n";
    return kBadInput;
  }
  TimeDefs defs = standard_time_defs();
  if (!o.fault.empty()) defs = apply_fault(defs, o.fault);
  std::vector<std::uint64_t> sizes = o.sizes.empty() ? std::vector<std::uint64_t>{16, 256} : o.sizes;
  Table t{{"algorithm", "n", "trial", "cost", "bound", "ratio", "correct", "audit"}, {}};
  bool ok = true;
  for (std::uint64_t n : sizes) {
    for (unsigned k = 0; k < o.trials; ++k) {
      algo::CheckedRun c = algo::checked_run(*b, n, o.seed + k, defs);
      ok &= c.pass();
      t.rows.push_back({b->name, std::to_string(c.run.size), std::to_string(k), std::to_string(c.run.cost),
                        c.run.bound.str(), fixed(c.run.ratio()), c.run.correct ? "yes" : "no",
                        c.audit.ok() ? "ok" : c.audit.failures.front()});
    }
  }
  Sink s(o.out, out);
  t.write(s.get(), o.format);
  return ok ? kOk : kCheckFailed;
}

inline int cmd_recurrence(const Options& o, std::ostream& out, std::ostream& err) {
  AkraBazziSpec spec;
  AkraBazziResult r;
  try {
    spec = load_spec(o.spec_path);
    if (!spec.g_concrete) throw SpecError("g_concrete is required for the ratio check");
    r = akra_bazzi_class(spec);
  } catch (const std::exception& e) {
    err << "invalid spec: " << e.what() << "\n";
    return kBadInput;
  }
  RecurrenceEvaluator ev(spec);
  RatioCheck rc;
  try {
    rc = empirical_ratio_check(ev, r.result_class, 4, 16);
  } catch (const std::exception& e) {
    err << "evaluation failed: " << e.what() << "\n";
    return kBadInput;
  }
  out << "spec: " << spec.name << "\n"
      << "p: " << std::setprecision(10) << static_cast<double>(r.p) << "\n"
      << "case: " << case_name(r.case_tag) << "\n"
      << "class: " << theta_str(r.result_class) << "\n"
      << "residual: " << std::scientific << std::setprecision(2) << static_cast<double>(r.residual) << std::defaultfloat
      << "\n"
      << "ratio range: [" << fixed(rc.min_ratio) << ", " << fixed(rc.max_ratio) << "] within slack "
      << fixed(rc.slack, 1) << ": " << (rc.pass ? "pass" : "fail") << "\n";
  return rc.pass ? kOk : kCheckFailed;
}

/// Runs the sequence with a provisional multiplier, then scores the ledger
/// with the requested multiplier or, by default, the minimal one.
template <class S>
int amortized_report(const AmortizedScheme<S>& scheme, S state, const std::vector<OpCall>& ops,
                     std::function<Int(std::uint64_t)> shape, const Options& o, std::ostream& out) {
  SequenceReport rep = run_sequence(scheme, ops, state, o.seed);
  std::optional<MultiplierResult> best;
  if (!rep.entries.empty()) {
    try {
      best = minimal_multiplier(shape, rep.entries);
    } catch (const NoMultiplier&) {
    }
  }
  unsigned K = o.multiplier ? *o.multiplier : best ? best->K : 1024;
  SequenceReport scored;
  scored.p_initial = rep.p_initial;
  scored.p_final = rep.p_final;
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    OpLedgerEntry e = rep.entries[i];
    e.f_at = Int(K) * shape(e.n);
    scored.sum_f_t += e.f_t;
    scored.sum_f_at += e.f_at;
    if (!e.pass() && scored.per_op_pass) {
      scored.per_op_pass = false;
      scored.failure = ReplayRecord{scheme.name, o.seed, i, e, ops[i].arg.str()};
    }
    scored.entries.push_back(e);
  }
  if (!o.out.empty()) {
    Sink s(o.out, out);
    write_ledger_csv(s.get(), scored.entries);
  }
  out << "scheme: " << scheme.name << "\n"
      << "ops: " << ops.size() << "\n"
      << "seed: " << o.seed << "\n"
      << "minimal multiplier: " << (best ? std::to_string(best->K) : std::string("none up to 1024")) << "\n"
      << "multiplier used: " << K << "\n"
      << "sum f_t: " << scored.sum_f_t << "\n"
      << "sum f_at: " << scored.sum_f_at << "\n"
      << "P initial: " << scored.p_initial << "\n"
      << "P final: " << scored.p_final << "\n"
      << "per-op: " << (scored.per_op_pass ? "pass" : "fail") << "\n"
      << "telescoped: " << (scored.telescoped_pass() ? "pass" : "fail") << "\n";
  if (best) {
    out << "binding: op " << best->binding.op << " at n = " << best->binding.n << ", slack " << best->binding.slack()
        << "\n";
  }
  if (scored.failure) out << "counterexample:\n" << scored.failure->to_text();
  return scored.pass() ? kOk : kCheckFailed;
}

inline int cmd_amortized(const Options& o, std::ostream& out, std::ostream& err) {
  constexpr unsigned kProvisional = 64;
  if (o.scheme == "dynarray" || o.scheme == "dynamic_array") {
    return amortized_report(algo::dynarray_scheme(kProvisional), algo::dyn_state(), algo::dyn_ops(o.ops, o.seed),
                            algo::unit_shape, o, out);
  }
  if (o.scheme == "skew" || o.scheme == "skew_heap") {
    return amortized_report(algo::skew_scheme(kProvisional), algo::TreeState{}, algo::skew_ops(o.ops, o.seed),
                            algo::log_shape, o, out);
  }
  if (o.scheme == "splay" || o.scheme == "splay_tree") {
    return amortized_report(algo::splay_scheme(kProvisional), algo::TreeState{}, algo::splay_ops(o.ops, o.seed),
                            algo::log_shape, o, out);
  }
  err << "unknown scheme: " << o.scheme << " (dynarray, skew, splay)\n";
  return kBadInput;
}

inline int cmd_report(const Options& o, std::ostream& out) {
  TimeDefs defs = standard_time_defs();
  if (!o.fault.empty()) defs = apply_fault(defs, o.fault);
  std::vector<std::uint64_t> sizes = o.sizes.empty() ? std::vector<std::uint64_t>{0, 1, 8, 64, 256} : o.sizes;
  Table t{{"case", "max_size", "max_ratio", "claim", "derived", "runs", "class", "verdict"}, {}};
  bool ok = true;
  for (const auto& b : algo::standard_bundles()) {
    algo::ReportRow r = algo::report_row(b, defs, algo::standard_registry(), sizes, o.trials, o.seed);
    ok &= r.pass();
    t.rows.push_back({r.name, std::to_string(r.max_size), fixed(r.max_ratio), r.claim, r.cls.derived,
                      r.runs_pass ? "pass" : "fail", r.cls.pass ? "pass" : "fail", r.pass() ? "pass" : "fail"});
  }
  Sink s(o.out, out);
  t.write(s.get(), o.format);
  return ok ? kOk : kCheckFailed;
}

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cost-instrumented case studies, recurrence solving and amortized ledgers"};
  app.require_subcommand(1);
  Options o;

  auto sizes_opt = [&](CLI::App* c) { c->add_option("--sizes", o.sizes, "comma separated sizes")->delimiter(','); };
  auto format_opt = [&](CLI::App* c) {
    c->add_option("--format", o.format, "csv or markdown")->check(CLI::IsMember({"csv", "markdown"}));
  };

  auto* run = app.add_subcommand("run", "run a case study and compare costs with its bound");
  run->add_option("algorithm", o.algo)->required();
  sizes_opt(run);
  run->add_option("--trials", o.trials)->check(CLI::PositiveNumber);
  run->add_option("--seed", o.seed);
  format_opt(run);
  run->add_option("--out", o.out);
  run->add_option("--fault", o.fault, "decrement literal name:index of a runtime function");

  auto* rec = app.add_subcommand("recurrence", "solve a divide-and-conquer recurrence spec");
  rec->add_option("spec", o.spec_path)->required();

  auto* am = app.add_subcommand("amortized", "check an amortized scheme on a random operation sequence");
  am->add_option("scheme", o.scheme)->required();
  am->add_option("--ops", o.ops);
  am->add_option("--seed", o.seed);
  am->add_option("--multiplier", o.multiplier)->check(CLI::PositiveNumber);
  am->add_option("--out", o.out, "ledger CSV path");

  auto* rep = app.add_subcommand("report", "one row per case study");
  sizes_opt(rep);
  rep->add_option("--trials", o.trials)->check(CLI::PositiveNumber);
  rep->add_option("--seed", o.seed);
  format_opt(rep);
  rep->add_option("--out", o.out);
  rep->add_option("--fault", o.fault, "decrement literal name:index of a runtime function");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kBadInput;
  }
  try {
    if (*run) return cmd_run(o, out, err);
    if (*rec) return cmd_recurrence(o, out, err);
    if (*am) return cmd_amortized(o, out, err);
    return cmd_report(o, out);
  } catch (const BadInput& e) {
    err << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
}

}  // namespace timecredit::cli
