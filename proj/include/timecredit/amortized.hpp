#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "timecredit/value.hpp"

namespace timecredit {

class PreconditionViolated : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NoMultiplier : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation consumes one structure and produces one; `run` mutates the
/// structure in place and returns the interpreter cost.
template <class S>
struct AmortizedOp {
  std::string name;
  std::function<std::uint64_t(S&, const Value& arg)> run;
  std::function<std::uint64_t(const S&)> size;
  std::function<Int(std::uint64_t n)> f_at;
};

template <class S>
struct AmortizedScheme {
  std::string name;
  std::function<Int(const S&)> potential;
  std::function<bool(const S&)> precondition;
  std::vector<AmortizedOp<S>> ops;

  const AmortizedOp<S>& op(const std::string& n) const {
    for (const auto& o : ops) {
      if (o.name == n) return o;
    }
    throw std::invalid_argument("scheme " + name + " has no operation " + n);
  }
};

struct OpLedgerEntry {
  std::string op;
  std::uint64_t n = 0;
  Int f_t, f_at, p_before, p_after;

  Int slack() const { return f_at + p_before - f_t - p_after; }
  bool pass() const { return slack() >= 0; }
};

struct OpCall {
  std::string op;
  Value arg;
};

/// Runs one operation and records the amortized inequality
/// f_at + P(before) >= f_t + P(after). The structure is updated in place.
template <class S>
OpLedgerEntry check_op_inequality(const AmortizedScheme<S>& scheme, const std::string& op, S& s,
                                  const Value& arg = Unit{}, std::optional<Int> known_before = std::nullopt) {
  if (scheme.precondition && !scheme.precondition(s)) {
    throw PreconditionViolated(scheme.name + "." + op + ": input violates the structural precondition");
  }
  const auto& o = scheme.op(op);
  OpLedgerEntry e;
  e.op = op;
  e.n = o.size(s);
  e.f_at = o.f_at(e.n);
  e.p_before = known_before ? *known_before : scheme.potential(s);
  e.f_t = Int(o.run(s, arg));
  e.p_after = scheme.potential(s);
  if (e.p_before < 0 || e.p_after < 0) throw std::logic_error(scheme.name + ": negative potential");
  return e;
}

/// Enough to re-run a failing sequence: scheme, seed, and the failing step.
struct ReplayRecord {
  std::string scheme;
  std::uint64_t seed = 0;
  std::size_t index = 0;
  OpLedgerEntry entry;
  std::string arg;

  std::string to_text() const {
    std::ostringstream os;
    os << "scheme: " << scheme << "\nseed: " << seed << "\nstep: " << index << "\nop: " << entry.op
       << "\narg: " << arg << "\nn: " << entry.n << "\nf_t: " << entry.f_t << "\nf_at: " << entry.f_at
       << "\nP_before: " << entry.p_before << "\nP_after: " << entry.p_after << "\nslack: " << entry.slack() << "\n";
    return os.str();
  }
};

struct SequenceReport {
  std::vector<OpLedgerEntry> entries;
  Int sum_f_t = 0, sum_f_at = 0, p_initial = 0, p_final = 0;
  bool per_op_pass = true;
  std::optional<ReplayRecord> failure;  // first failing step

  bool telescoped_pass() const { return sum_f_t <= sum_f_at + p_initial - p_final; }
  bool pass() const { return per_op_pass && telescoped_pass(); }
};

template <class S>
SequenceReport run_sequence(const AmortizedScheme<S>& scheme, const std::vector<OpCall>& ops, S& s,
                            std::uint64_t seed = 0) {
  SequenceReport r;
  r.p_initial = scheme.potential(s);
  r.p_final = r.p_initial;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    OpLedgerEntry e = check_op_inequality(scheme, ops[i].op, s, ops[i].arg, r.p_final);
    r.sum_f_t += e.f_t;
    r.sum_f_at += e.f_at;
    r.p_final = e.p_after;
    if (!e.pass() && r.per_op_pass) {
      r.per_op_pass = false;
      r.failure = ReplayRecord{scheme.name, seed, i, e, ops[i].arg.str()};
    }
    r.entries.push_back(std::move(e));
  }
  return r;
}

struct MultiplierResult {
  unsigned K = 0;
  OpLedgerEntry binding;  // tightest slack under K
};

/// Smallest K in [1, 1024] such that f_at = K * shape(n) passes every entry
/// of the corpus (entries' own f_at is ignored).
inline MultiplierResult minimal_multiplier(const std::function<Int(std::uint64_t)>& shape,
                                           const std::vector<OpLedgerEntry>& corpus) {
  if (corpus.empty()) throw std::invalid_argument("empty corpus");
  auto with_k = [&](unsigned K, const OpLedgerEntry& e) {
    OpLedgerEntry x = e;
    x.f_at = Int(K) * shape(e.n);
    return x;
  };
  auto passes = [&](unsigned K) {
    for (const auto& e : corpus) {
      if (!with_k(K, e).pass()) return false;
    }
    return true;
  };
  if (!passes(1024)) throw NoMultiplier("no multiplier up to 1024 fits the corpus");
  unsigned lo = 1, hi = 1024;
  while (lo < hi) {
    unsigned mid = (lo + hi) / 2;
    if (passes(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  MultiplierResult m;
  m.K = lo;
  bool first = true;
  for (const auto& e : corpus) {
    OpLedgerEntry x = with_k(lo, e);
    if (first || x.slack() < m.binding.slack()) m.binding = x;
    first = false;
  }
  return m;
}

inline void write_ledger_csv(std::ostream& os, const std::vector<OpLedgerEntry>& entries) {
  os << "# timecredit ledger v1\n";
  os << "op,n,f_t,f_at,P_before,P_after,slack\n";
  for (const auto& e : entries) {
    os << e.op << ',' << e.n << ',' << e.f_t << ',' << e.f_at << ',' << e.p_before << ',' << e.p_after << ','
       << e.slack() << '\n';
  }
}

}  // namespace timecredit
