#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "timecredit/algorithms/defs.hpp"
#include "timecredit/algorithms/derive.hpp"
#include "timecredit/algorithms/numeric.hpp"
#include "timecredit/algorithms/schemes.hpp"
#include "timecredit/algorithms/sorting.hpp"
#include "timecredit/algorithms/structures.hpp"

namespace timecredit::algo {

/// One run of a case study on a generated input.
struct RunResult {
  std::uint64_t size = 0;
  std::uint64_t cost = 0;
  Int bound = 0;
  bool correct = true;
  std::string detail;

  bool within() const { return Int(cost) <= bound; }
  long double ratio() const {
    long double b = bound.convert_to<long double>();
    return b > 0 ? static_cast<long double>(cost) / b : 0.0L;
  }
};

using RunFn = std::function<RunResult(std::uint64_t n, std::uint64_t seed, const TimeDefs&, ObligationLog*)>;

/// A case study: instrumented run with oracle, runtime function, claimed
/// class, declared hints, and a small workload that reaches every branch.
struct Bundle {
  std::string name;
  std::string time_fn;
  LandauClass claim;
  std::vector<std::string> hints;
  bool amortized = false;
  RunFn run;
  std::vector<std::uint64_t> probe_sizes;
  unsigned probe_seeds = 2;
};

namespace bundle_detail {

inline ValueList ints(const std::vector<long long>& xs) {
  ValueList out;
  for (long long x : xs) out.emplace_back(x);
  return out;
}

inline std::vector<long long> read_ints(const Heap& h, Addr a) {
  std::vector<long long> out;
  for (const auto& v : h.array(a)) out.push_back(v.as_int().convert_to<long long>());
  return out;
}

inline std::vector<long long> random_ints(std::mt19937_64& rng, std::uint64_t n, long long lo, long long hi) {
  std::vector<long long> xs(n);
  for (auto& x : xs) x = lo + static_cast<long long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  return xs;
}

/// Index of the first frame opened by the next operation.
inline std::size_t mark(const ObligationLog& log) { return log.frames.size(); }

inline Int frame_bound(const ObligationLog& log, std::size_t i, const TimeDefs& defs) {
  const FrameRecord& f = log.frames.at(i);
  return defs.eval(f.fn, f.args());
}

// ---------------------------------------------------------------- runners

inline RunResult run_merge_sort(std::uint64_t n, std::uint64_t seed, const TimeDefs& defs, ObligationLog* log) {
  std::mt19937_64 rng(seed);
  auto xs = random_ints(rng, n, -1000, 1000);
  Heap h;
  Addr X = h.alloc_array(ints(xs));
  Machine m(std::move(h));
  Exec ex(m, log);
  merge_sort(ex, X);
  std::sort(xs.begin(), xs.end());
  return {n, m.cost(), defs.eval("merge_sort_time", {Int(n)}), read_ints(m.heap(), X) == xs, {}};
}

inline RunResult run_insertion_sort(std::uint64_t n, std::uint64_t seed, const TimeDefs& defs, ObligationLog* log) {
  std::mt19937_64 rng(seed);
  auto xs = random_ints(rng, n, -1000, 1000);
  Heap h;
  Addr X = h.alloc_array(ints(xs));
  Machine m(std::move(h));
  Exec ex(m, log);
  insertion_sort(ex, X);
  std::sort(xs.begin(), xs.end());
  return {n, m.cost(), defs.eval("insertion_sort_time", {Int(n)}), read_ints(m.heap(), X) == xs, {}};
}

inline RunResult run_binary_search(std::uint64_t n, std::uint64_t seed, const TimeDefs& defs, ObligationLog* log) {
  std::mt19937_64 rng(seed);
  std::vector<long long> xs(n);
  long long cur = 0;
  for (auto& x : xs) x = cur += 1 + static_cast<long long>(rng() % 3);
  long long key = (n && rng() % 2) ? xs[rng() % n] : static_cast<long long>(rng() % (2 * n + 2));
  Heap h;
  Addr A = h.alloc_array(ints(xs));
  Machine m(std::move(h));
  Exec ex(m, log);
  long long got = binary_search(ex, A, Int(key)).as_int().convert_to<long long>();
  bool present = std::binary_search(xs.begin(), xs.end(), key);
  bool ok = present ? (got >= 0 && xs[static_cast<std::size_t>(got)] == key) : got == -1;
  return {n, m.cost(), defs.eval("binary_search_time", {Int(n)}), ok, "key " + std::to_string(key)};
}

/// Sizes below 1 are raised to 1 (selection needs an element).
inline RunResult run_select(std::uint64_t n, std::uint64_t seed, const TimeDefs& defs, ObligationLog* log) {
  n = std::max<std::uint64_t>(n, 1);
  std::mt19937_64 rng(seed);
  auto xs = random_ints(rng, n, 0, static_cast<long long>(n / 2));
  std::uint64_t i = rng() % n;
  Heap h;
  Addr X = h.alloc_array(ints(xs));
  Machine m(std::move(h));
  Exec ex(m, log);
  long long got = select(ex, X, i).as_int().convert_to<long long>();
  std::sort(xs.begin(), xs.end());
  return {n, m.cost(), defs.eval("select_main_time", {Int(n)}), got == xs[i], "i = " + std::to_string(i)};
}

inline std::vector<long long> schoolbook(const std::vector<long long>& p, const std::vector<long long>& q) {
  if (p.empty()) return {};
  std::vector<long long> r(p.size() + q.size() - 1, 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  }
  return r;
}

inline RunResult run_karatsuba(std::uint64_t n, std::uint64_t seed, const TimeDefs& defs, ObligationLog* log) {
  std::mt19937_64 rng(seed);
  auto p = random_ints(rng, n, -9, 9), q = random_ints(rng, n, -9, 9);
  Heap h;
  Addr P = h.alloc_array(ints(p)), Q = h.alloc_array(ints(q));
  Machine m(std::move(h));
  Exec ex(m, log);
  Addr R = karatsuba(ex, P, Q);
  return {n, m.cost(), defs.eval("karatsuba_time", {Int(n)}), read_ints(m.heap(), R) == schoolbook(p, q), {}};
}

inline long long knapsack_oracle(const std::vector<long long>& w, const std::vector<long long>& v, long long W) {
  if (w.size() <= 16) {
    long long best = 0;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << w.size()); ++s) {
      long long tw = 0, tv = 0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (s >> i & 1) tw += w[i], tv += v[i];
      }
      if (tw <= W) best = std::max(best, tv);
    }
    return best;
  }
  std::vector<long long> d(static_cast<std::size_t>(W) + 1, 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (long long c = W; c >= w[i]; --c) d[c] = std::max(d[c], d[c - w[i]] + v[i]);
  }
  return d[W];
}

/// n items, capacity W = 2n + 3; weights may be 0.
inline RunResult run_knapsack(std::uint64_t n, std::uint64_t seed, const TimeDefs& defs, ObligationLog* log) {
  std::mt19937_64 rng(seed);
  long long W = 2 * static_cast<long long>(n) + 3;
  auto w = random_ints(rng, n, 0, W / 2 + 1), v = random_ints(rng, n, 0, 20);
  Heap h;
  Addr Wa = h.alloc_array(ints(w)), Va = h.alloc_array(ints(v));
  Machine m(std::move(h));
  Exec ex(m, log);
  long long got = knapsack(ex, Wa, Va, static_cast<std::uint64_t>(W)).as_int().convert_to<long long>();
  return {n, m.cost(), defs.eval("knapsack_time", {Int(n), Int(W)}), got == knapsack_oracle(w, v, W),
          "W = " + std::to_string(W)};
}

inline RunResult run_dynarray(std::uint64_t n, std::uint64_t seed, const TimeDefs& defs, ObligationLog* log) {
  ObligationLog local;
  ObligationLog& lg = log ? *log : local;
  Heap h;
  DynArray d = dyn_empty(h);
  Machine m(std::move(h));
  Exec ex(m, &lg);
  std::vector<Value> oracle;
  RunResult r{n, 0, 0, true, {}};
  for (const auto& op : dyn_ops(n, seed)) {
    std::size_t at = mark(lg);
    if (op.op == "push") {
      dyn_push(ex, d, op.arg);
      oracle.push_back(op.arg);
    } else if (op.op == "get") {
      r.correct &= dyn_get(ex, d, op.arg.as_index()) == oracle.at(op.arg.as_index());
    } else {
      r.correct &= dyn_len(ex, d).as_index() == oracle.size();
    }
    r.bound += frame_bound(lg, at, defs);
  }
  const ValueList& arr = m.heap().array(d.arr);
  r.correct &= d.len == oracle.size() && std::equal(oracle.begin(), oracle.end(), arr.begin());
  r.cost = m.cost();
  return r;
}

inline RunResult run_skew(std::uint64_t n, std::uint64_t seed, const TimeDefs& defs, ObligationLog* log) {
  ObligationLog local;
  ObligationLog& lg = log ? *log : local;
  Machine m;
  Exec ex(m, &lg);
  Value root;
  std::multiset<long long> oracle;
  RunResult r{n, 0, 0, true, {}};
  for (const auto& op : skew_ops(n, seed)) {
    std::size_t at = mark(lg);
    if (op.op == "insert") {
      root = skew_insert(ex, root, op.arg.as_int());
      oracle.insert(op.arg.as_int().convert_to<long long>());
    } else {
      auto [k, rest] = skew_del_min(ex, root);
      root = rest;
      r.correct &= k == *oracle.begin();
      oracle.erase(oracle.begin());
    }
    r.bound += frame_bound(lg, at, defs);
  }
  r.correct &= tree::is_heap_ordered(m.heap(), root) && tree::size(m.heap(), root) == oracle.size();
  r.cost = m.cost();
  return r;
}

inline RunResult run_splay(std::uint64_t n, std::uint64_t seed, const TimeDefs& defs, ObligationLog* log) {
  ObligationLog local;
  ObligationLog& lg = log ? *log : local;
  Machine m;
  Exec ex(m, &lg);
  Value root;
  std::set<long long> oracle;
  RunResult r{n, 0, 0, true, {}};
  for (const auto& op : splay_ops(n, seed, static_cast<long long>(std::max<std::uint64_t>(n, 4)))) {
    std::size_t at = mark(lg);
    long long x = op.arg.as_int().convert_to<long long>();
    if (op.op == "insert") {
      root = splay_insert(ex, root, Int(x));
      oracle.insert(x);
      r.correct &= tree::key(m.heap(), root) == x;
    } else if (op.op == "lookup") {
      auto [found, t] = splay_lookup(ex, root, Int(x));
      root = t;
      r.correct &= found == (oracle.count(x) != 0);
    } else {
      std::uint64_t depth = 0;
      root = splay(ex, Int(x), root, depth);
      if (oracle.count(x)) r.correct &= tree::key(m.heap(), root) == x;
    }
    r.bound += frame_bound(lg, at, defs);
  }
  auto ks = tree::keys(m.heap(), root);
  r.correct &= tree::is_bst(m.heap(), root) && ks.size() == oracle.size() &&
               std::equal(ks.begin(), ks.end(), oracle.begin(), [](const Int& a, long long b) { return a == b; });
  r.cost = m.cost();
  return r;
}

}  // namespace bundle_detail

/// The nine case studies.
inline std::vector<Bundle> standard_bundles() {
  using namespace bundle_detail;
  std::vector<std::uint64_t> small;
  for (std::uint64_t n = 0; n <= 12; ++n) small.push_back(n);
  auto plus = [](std::vector<std::uint64_t> v, std::initializer_list<std::uint64_t> more) {
    v.insert(v.end(), more);
    return v;
  };
  std::vector<Bundle> out;
  out.push_back({"merge_sort", "merge_sort_time", PolyLog{1, 1}, {}, false, run_merge_sort, plus(small, {17, 33}), 2});
  out.push_back({"insertion_sort", "insertion_sort_time", PolyLog{2, 0}, {}, false, run_insertion_sort,
                 plus(small, {20}), 2});
  out.push_back({"binary_search", "binary_search_time", PolyLog{0, 1}, {"bsearch_upper_half"}, false,
                 run_binary_search, plus(small, {31, 64}), 6});
  out.push_back({"select", "select_main_time", PolyLog{1, 0}, {"select_larger_part"}, false, run_select,
                 plus(small, {23, 41, 70, 128}), 4});
  out.push_back({"karatsuba", "karatsuba_time", RealPower{std::log2(3.0L), "", 0}, {}, false, run_karatsuba,
                 plus(small, {17}), 2});
  out.push_back({"knapsack", "knapsack_time", Class2(PolyLog2{1, 0, 1, 0}), {}, false, run_knapsack, small, 2});
  out.push_back({"dynamic_array", "push_time", PolyLog{0, 0}, {}, true, run_dynarray, {40, 200}, 2});
  out.push_back({"skew_heap", "sh_insert_time", PolyLog{0, 1}, {}, true, run_skew, {40, 200}, 2});
  out.push_back({"splay_tree", "splay_insert_time", PolyLog{0, 1}, {}, true, run_splay, {40, 200}, 2});
  return out;
}

inline std::optional<Bundle> find_bundle(const std::string& name) {
  for (auto& b : standard_bundles()) {
    if (b.name == name) return b;
  }
  return std::nullopt;
}

// ------------------------------------------------------ auxiliary registration

class RegistrationRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checks atake_time, adrop_time and mergeinto_time against the
/// implementation for every n <= max_n and registers their classes.
inline void register_auxiliaries(const TimeDefs& defs, BoundRegistry& reg, std::uint64_t max_n = 4096) {
  for (std::uint64_t n = 0; n <= max_n; ++n) {
    std::vector<Value> xs(n, Value(0));
    Heap h;
    Addr X = h.alloc_array(xs);
    std::uint64_t m = n / 2;
    std::vector<Value> a, b;
    for (std::uint64_t i = 0; i < m; ++i) a.emplace_back(static_cast<long long>(2 * i));
    for (std::uint64_t i = m; i < n; ++i) b.emplace_back(static_cast<long long>(2 * (i - m) + 1));
    Addr A = h.alloc_array(a), B = h.alloc_array(b);
    Machine mc(std::move(h));
    Exec ex(mc);
    auto check = [&](const char* f, std::uint64_t cost) {
      Int bound = defs.eval(f, {Int(n)});
      if (Int(cost) > bound) {
        throw RegistrationRejected(std::string(f) + "(" + std::to_string(n) + ") = " + bound.str() +
                                   " is below the cost " + std::to_string(cost));
      }
    };
    std::uint64_t c0 = mc.cost();
    ex.atake(m, X, 0);
    check("atake_time", mc.cost() - c0);
    c0 = mc.cost();
    ex.adrop(m, X, 0);
    check("adrop_time", mc.cost() - c0);
    c0 = mc.cost();
    mergeinto(ex, A, B, X, m, n - m);
    check("mergeinto_time", mc.cost() - c0);
  }
  BoundRegistry scratch;
  Deriver d(defs, scratch);
  for (const char* f : {"atake_time", "adrop_time", "mergeinto_time"}) {
    reg.declare(f, std::get<PolyLog>(d.derive(f).cls), "swept");
  }
}

/// Registry with the swept auxiliaries, built once per process.
inline const BoundRegistry& standard_registry() {
  static const BoundRegistry reg = [] {
    BoundRegistry r;
    register_auxiliaries(standard_time_defs(), r);
    return r;
  }();
  return reg;
}

// ------------------------------------------------------------- class checks

struct ClassVerdict {
  bool pass = false;
  std::string derived;
  std::string detail;
};

/// Shape of the amortized claims, by bundle.
inline std::function<Int(std::uint64_t)> amortized_shape(const std::string& bundle) {
  if (bundle == "dynamic_array") return unit_shape;
  return log_shape;
}

/// The claim must equal the class derived from the runtime functions and
/// survive a witness check calibrated on small sizes and verified on larger
/// ones. Amortized bundles check the shape of their amortized claim.
inline ClassVerdict class_check(const Bundle& b, const TimeDefs& defs, const LandauClass& claim,
                                const BoundRegistry& base) {
  ClassVerdict v;
  try {
    if (b.amortized) {
      auto shape = amortized_shape(b.name);
      v.derived = b.name == "dynamic_array" ? "1" : "ceil(3 log2 n) + 2";
      Fn1 f = [&](std::uint64_t n) { return shape(n).convert_to<long double>(); };
      auto w = calibrate_and_verify(f, claim, powers_of_two(4, 12), off_power_samples(12, 40));
      v.pass = w.pass;
      v.detail = w.pass ? "shape witness holds" : w.detail;
      return v;
    }
    BoundRegistry reg = base;
    Deriver dv(defs, reg);
    const Derivation& d = dv.derive(b.time_fn);
    v.derived = theta_str(d.cls);
    if (!same_class(d.cls, claim)) {
      v.detail = "derived " + v.derived + " differs from the claim " + theta_str(claim);
      return v;
    }
    WitnessReport w;
    if (auto* c2 = std::get_if<Class2>(&claim)) {
      Fn2 f = [&](std::uint64_t m, std::uint64_t n) {
        return defs.eval(b.time_fn, {Int(m), Int(n)}).convert_to<long double>();
      };
      w = calibrate_and_verify2(f, *c2, powers_of_two(4, 7), powers_of_two(4, 10));
    } else {
      Fn1 f = [&](std::uint64_t n) { return defs.eval(b.time_fn, {Int(n)}).convert_to<long double>(); };
      auto verify = powers_of_two(11, 16);
      for (auto x : off_power_samples(11, 16)) verify.push_back(x);
      w = calibrate_and_verify(f, claim, powers_of_two(4, 10), verify);
    }
    v.pass = w.pass;
    v.detail = w.pass ? "derived by " + d.method + "; witness holds" : w.detail;
  } catch (const std::exception& e) {
    v.detail = e.what();
  }
  return v;
}

// ------------------------------------------------------------ checked runs

struct CheckedRun {
  RunResult run;
  AuditReport audit;
  bool pass() const { return run.correct && run.within() && audit.ok(); }
};

inline CheckedRun checked_run(const Bundle& b, std::uint64_t n, std::uint64_t seed, const TimeDefs& defs) {
  ObligationLog log;
  CheckedRun c;
  c.run = b.run(n, seed, defs, &log);
  c.audit = audit(log, defs);
  return c;
}

/// Whether the probe workload notices that `defs` is wrong somewhere.
inline bool probe_detects(const Bundle& b, const TimeDefs& defs) {
  for (std::uint64_t n : b.probe_sizes) {
    for (unsigned s = 1; s <= b.probe_seeds; ++s) {
      if (!checked_run(b, n, s, defs).pass()) return true;
    }
  }
  return false;
}

namespace bundle_detail {

inline void named_calls(const TimeExpr& e, std::set<std::string>& out) {
  if (e.kind() == TimeExpr::Kind::Lit) return;
  if (e.kind() == TimeExpr::Kind::Atom) {
    std::function<void(const Term&)> walk = [&](const Term& t) {
      if (t.kind() == Term::Kind::App && !t.is_builtin()) out.insert(t.name());
      for (const auto& a : t.args()) walk(a);
    };
    walk(e.atom());
    return;
  }
  named_calls(e.lhs(), out);
  named_calls(e.rhs(), out);
}

}  // namespace bundle_detail

/// Runtime functions reached by the probe workload, as frames or as named
/// primitive demands.
inline std::set<std::string> probe_functions(const Bundle& b, const TimeDefs& defs) {
  std::set<std::string> fs;
  for (std::uint64_t n : b.probe_sizes) {
    ObligationLog log;
    b.run(n, 1, defs, &log);
    for (const auto& f : log.frames) {
      fs.insert(f.fn);
      for (const auto& e : f.events) bundle_detail::named_calls(e.demand, fs);
    }
  }
  return fs;
}

// ----------------------------------------------------------------- reports

struct ReportRow {
  std::string name;
  std::uint64_t max_size = 0;
  long double max_ratio = 0;
  std::string claim;
  bool runs_pass = true;
  ClassVerdict cls;
  bool pass() const { return runs_pass && cls.pass; }
};

inline ReportRow report_row(const Bundle& b, const TimeDefs& defs, const BoundRegistry& reg,
                            const std::vector<std::uint64_t>& sizes, unsigned trials, std::uint64_t seed) {
  ReportRow r;
  r.name = b.name;
  r.claim = b.amortized ? "amortized " + theta_str(b.claim) : theta_str(b.claim);
  for (std::uint64_t n : sizes) {
    for (unsigned t = 0; t < trials; ++t) {
      CheckedRun c = checked_run(b, n, seed + t, defs);
      r.max_size = std::max(r.max_size, c.run.size);
      r.max_ratio = std::max(r.max_ratio, c.run.ratio());
      r.runs_pass &= c.pass();
    }
  }
  r.cls = class_check(b, defs, b.claim, reg);
  return r;
}

}  // namespace timecredit::algo
