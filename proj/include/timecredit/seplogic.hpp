#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "timecredit/computation.hpp"

namespace timecredit {

/// A heap, the addresses it owns, and a stock of time credits.
struct PartialHeap {
  Heap heap;
  std::set<std::uint64_t> owned;
  std::uint64_t credits = 0;

  bool well_formed() const {
    for (auto id : owned) {
      if (!heap.allocated(id)) return false;
    }
    return heap.well_formed();
  }

  /// Text dump used by counterexample records; stable across runs.
  std::string dump() const {
    std::ostringstream os;
    os << "credits: " << credits << "\nowned:";
    for (auto id : owned) os << ' ' << id;
    os << "\nheap: " << heap << '\n';
    return os.str();
  }
};

/// Disjoint union; throws if the owned sets overlap.
inline PartialHeap combine(const PartialHeap& a, const PartialHeap& b) {
  PartialHeap out = a;
  for (auto id : b.owned) {
    if (!out.owned.insert(id).second) throw std::invalid_argument("overlapping partial heaps");
  }
  out.credits += b.credits;
  return out;
}

class Undecidable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Assertion;
using Binder = std::function<Assertion(const Value&)>;

class Assertion {
 public:
  enum class Kind { Emp, Credits, PointsToRef, PointsToArray, Pure, SepConj, Exists, Top };

  struct Node {
    Kind kind = Kind::Emp;
    std::uint64_t credits = 0;
    Addr addr;
    Value value;
    ValueList values;
    bool truth = true;
    std::shared_ptr<const Node> lhs, rhs;
    Binder body;
    std::string binder_name;
  };

  Assertion() : node_(std::make_shared<Node>()) {}

  Kind kind() const { return node_->kind; }
  const Node& node() const { return *node_; }
  Assertion lhs() const { return Assertion(node_->lhs); }
  Assertion rhs() const { return Assertion(node_->rhs); }

  static Assertion make(Node n) { return Assertion(std::make_shared<const Node>(std::move(n))); }

  friend Assertion operator*(const Assertion& p, const Assertion& q) {
    Node n;
    n.kind = Kind::SepConj;
    n.lhs = p.node_;
    n.rhs = q.node_;
    return make(std::move(n));
  }

  std::string str() const {
    const Node& n = *node_;
    std::ostringstream os;
    switch (n.kind) {
      case Kind::Emp: os << "emp"; break;
      case Kind::Credits: os << "$" << n.credits; break;
      case Kind::PointsToRef: os << "@r" << n.addr.id << " |-> " << n.value; break;
      case Kind::PointsToArray: os << "@a" << n.addr.id << " |->a " << Value(n.values); break;
      case Kind::Pure: os << "pure(" << (n.truth ? "true" : "false") << ")"; break;
      case Kind::SepConj: os << "(" << lhs().str() << " * " << rhs().str() << ")"; break;
      case Kind::Exists: os << "exists " << (n.binder_name.empty() ? "_" : n.binder_name) << ". ..."; break;
      case Kind::Top: os << "true"; break;
    }
    return os.str();
  }

 private:
  explicit Assertion(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

inline Assertion emp() { return Assertion(); }
inline Assertion credits(std::uint64_t n) {
  Assertion::Node x;
  x.kind = Assertion::Kind::Credits;
  x.credits = n;
  return Assertion::make(std::move(x));
}
inline Assertion points_to(Addr a, Value v) {
  Assertion::Node x;
  x.kind = Assertion::Kind::PointsToRef;
  x.addr = a;
  x.value = std::move(v);
  return Assertion::make(std::move(x));
}
inline Assertion points_to_array(Addr a, ValueList xs) {
  Assertion::Node x;
  x.kind = Assertion::Kind::PointsToArray;
  x.addr = a;
  x.values = std::move(xs);
  return Assertion::make(std::move(x));
}
inline Assertion pure(bool b) {
  Assertion::Node x;
  x.kind = Assertion::Kind::Pure;
  x.truth = b;
  return Assertion::make(std::move(x));
}
inline Assertion top() {
  Assertion::Node x;
  x.kind = Assertion::Kind::Top;
  return Assertion::make(std::move(x));
}
inline Assertion exists(Binder body, std::string name = {}) {
  Assertion::Node x;
  x.kind = Assertion::Kind::Exists;
  x.body = std::move(body);
  x.binder_name = std::move(name);
  return Assertion::make(std::move(x));
}

struct SatConfig {
  long long window_lo = -8;
  long long window_hi = 8;
  std::size_t max_candidates = 4096;
  std::size_t max_split_addresses = 20;
  std::uint64_t max_credit_enumeration = std::uint64_t{1} << 20;
};

namespace detail {

/// Credits every model of p must hold, when that is fixed by the syntax.
inline std::optional<std::uint64_t> credit_demand(const Assertion& p) {
  using K = Assertion::Kind;
  switch (p.kind()) {
    case K::Emp:
    case K::PointsToRef:
    case K::PointsToArray:
    case K::Pure: return 0;
    case K::Credits: return p.node().credits;
    case K::SepConj: {
      auto a = credit_demand(p.lhs());
      if (!a) return std::nullopt;
      auto b = credit_demand(p.rhs());
      if (!b) return std::nullopt;
      return *a + *b;
    }
    case K::Exists:
    case K::Top: return std::nullopt;
  }
  return std::nullopt;
}

/// Owned addresses every model of p must have, when fixed by the syntax.
inline std::optional<std::set<std::uint64_t>> footprint(const Assertion& p) {
  using K = Assertion::Kind;
  switch (p.kind()) {
    case K::Emp:
    case K::Credits:
    case K::Pure: return std::set<std::uint64_t>{};
    case K::PointsToRef:
    case K::PointsToArray: return std::set<std::uint64_t>{p.node().addr.id};
    case K::SepConj: {
      auto a = footprint(p.lhs());
      if (!a) return std::nullopt;
      auto b = footprint(p.rhs());
      if (!b) return std::nullopt;
      a->insert(b->begin(), b->end());
      return a;
    }
    case K::Exists:
    case K::Top: return std::nullopt;
  }
  return std::nullopt;
}

inline std::vector<Value> candidates(const Heap& h, const std::set<std::uint64_t>& owned,
                                     const SatConfig& cfg) {
  std::set<Value> out;
  for (long long i = cfg.window_lo; i <= cfg.window_hi; ++i) out.insert(Value(i));
  out.insert(Value(true));
  out.insert(Value(false));
  out.insert(Value(Unit{}));
  for (auto id : owned) {
    auto a = h.lookup(id);
    if (!a) continue;
    out.insert(Value(*a));
    if (a->kind == AddrKind::Ref) {
      out.insert(h.ref(*a));
    } else {
      const ValueList& xs = h.array(*a);
      out.insert(Value(xs));
      for (const Value& x : xs) out.insert(x);
    }
    if (out.size() > cfg.max_candidates) {
      throw Undecidable("existential candidate set exceeds enumeration bound");
    }
  }
  return {out.begin(), out.end()};
}

class Checker {
 public:
  Checker(const Heap& h, const SatConfig& cfg) : heap_(h), cfg_(cfg) {}

  bool sat(const std::set<std::uint64_t>& owned, std::uint64_t c, const Assertion& p) {
    using K = Assertion::Kind;
    const auto& n = p.node();
    switch (p.kind()) {
      case K::Emp: return owned.empty() && c == 0;
      case K::Credits: return owned.empty() && c == n.credits;
      case K::Pure: return owned.empty() && c == 0 && n.truth;
      case K::Top: return true;
      case K::PointsToRef:
        return c == 0 && owned.size() == 1 && *owned.begin() == n.addr.id && heap_.has_ref(n.addr) &&
               heap_.ref(n.addr) == n.value;
      case K::PointsToArray:
        return c == 0 && owned.size() == 1 && *owned.begin() == n.addr.id &&
               heap_.has_array(n.addr) && heap_.array(n.addr) == n.values;
      case K::Exists: {
        for (const Value& v : candidates(heap_, owned, cfg_)) {
          if (sat(owned, c, n.body(v))) return true;
        }
        return false;
      }
      case K::SepConj: return sat_conj(owned, c, p.lhs(), p.rhs());
    }
    return false;
  }

 private:
  bool sat_conj(const std::set<std::uint64_t>& owned, std::uint64_t c, const Assertion& p,
                const Assertion& q) {
    // Orient so that the side with a syntactically fixed footprint or demand
    // drives the split.
    auto fp = footprint(p);
    auto fq = footprint(q);
    auto dp = credit_demand(p);
    auto dq = credit_demand(q);

    auto try_credits = [&](const std::set<std::uint64_t>& op, const std::set<std::uint64_t>& oq) {
      if (dp) return *dp <= c && sat(op, *dp, p) && sat(oq, c - *dp, q);
      if (dq) return *dq <= c && sat(op, c - *dq, p) && sat(oq, *dq, q);
      if (c > cfg_.max_credit_enumeration) {
        throw Undecidable("credit split exceeds enumeration bound");
      }
      for (std::uint64_t k = 0; k <= c; ++k) {
        if (sat(op, k, p) && sat(oq, c - k, q)) return true;
      }
      return false;
    };

    auto split_by = [&](const std::set<std::uint64_t>& fixed, bool fixed_is_p) {
      std::set<std::uint64_t> rest;
      for (auto id : fixed) {
        if (!owned.count(id)) return false;
      }
      for (auto id : owned) {
        if (!fixed.count(id)) rest.insert(id);
      }
      return fixed_is_p ? try_credits(fixed, rest) : try_credits(rest, fixed);
    };

    if (fp) return split_by(*fp, true);
    if (fq) return split_by(*fq, false);

    if (owned.size() > cfg_.max_split_addresses) {
      throw Undecidable("address split exceeds enumeration bound");
    }
    std::vector<std::uint64_t> ids(owned.begin(), owned.end());
    const std::uint64_t total = std::uint64_t{1} << ids.size();
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      std::set<std::uint64_t> op, oq;
      for (std::size_t i = 0; i < ids.size(); ++i) ((mask >> i) & 1 ? op : oq).insert(ids[i]);
      if (try_credits(op, oq)) return true;
    }
    return false;
  }

  const Heap& heap_;
  const SatConfig& cfg_;
};

}  // namespace detail

inline bool sat(const PartialHeap& ph, const Assertion& p, const SatConfig& cfg = {}) {
  detail::Checker ch(ph.heap, cfg);
  return ch.sat(ph.owned, ph.credits, p);
}

struct HoareTriple {
  Assertion pre;
  Computation prog;
  std::function<Assertion(const Value&)> post;
  bool top_absorbing = false;
};

struct TripleVerdict {
  enum class Kind { Pass, FailExecution, FailCredits, FailPost };
  Kind kind = Kind::Pass;
  bool vacuous = false;
  std::uint64_t needed = 0;
  std::uint64_t available = 0;
  std::string reason;
  std::optional<PartialHeap> witness;
  std::vector<TraceEntry> trace;

  bool passed() const { return kind == Kind::Pass; }

  std::string str() const {
    std::ostringstream os;
    switch (kind) {
      case Kind::Pass: os << (vacuous ? "Pass (vacuous)" : "Pass"); break;
      case Kind::FailExecution: os << "FailExecution: " << reason; break;
      case Kind::FailCredits: os << "FailCredits needed=" << needed << " available=" << available; break;
      case Kind::FailPost: os << "FailPost"; break;
    }
    return os.str();
  }
};

inline TripleVerdict check_triple(const HoareTriple& t, const PartialHeap& ph,
                                  const SatConfig& cfg = {}) {
  TripleVerdict v;
  if (!sat(ph, t.pre, cfg)) {
    v.vacuous = true;
    return v;
  }
  Outcome o = run(t.prog, ph.heap, true);
  v.trace = o.trace;
  if (!o.ok()) {
    v.kind = TripleVerdict::Kind::FailExecution;
    v.reason = o.failure;
    return v;
  }
  if (o.cost() > ph.credits) {
    v.kind = TripleVerdict::Kind::FailCredits;
    v.needed = o.cost();
    v.available = ph.credits;
    return v;
  }
  PartialHeap after;
  after.heap = o.heap();
  after.owned = ph.owned;
  for (std::uint64_t id = ph.heap.next_addr(); id < after.heap.next_addr(); ++id) {
    if (after.heap.allocated(id)) after.owned.insert(id);
  }
  after.credits = ph.credits - o.cost();
  Assertion q = t.post(o.value());
  if (t.top_absorbing) q = q * top();
  if (!sat(after, q, cfg)) {
    v.kind = TripleVerdict::Kind::FailPost;
    v.witness = std::move(after);
  }
  return v;
}

/// One generated trial: a triple and a partial heap meant to satisfy its pre.
struct SampledCase {
  HoareTriple triple;
  PartialHeap model;
};
using CaseGenerator = std::function<SampledCase(std::uint64_t seed)>;

struct Counterexample {
  std::uint64_t seed = 0;
  std::string model_dump;
  std::string trace;
  std::string verdict;

  std::string to_text() const {
    std::ostringstream os;
    os << "seed: " << seed << '\n' << model_dump << "trace:" << trace << '\n' << "verdict: " << verdict << '\n';
    return os.str();
  }
};

inline std::string trace_text(const std::vector<TraceEntry>& tr) {
  std::ostringstream os;
  for (const auto& e : tr) os << ' ' << prim_name(e.prim) << ':' << e.cost;
  return os.str();
}

inline Counterexample make_counterexample(std::uint64_t seed, const PartialHeap& model,
                                          const TripleVerdict& v) {
  return {seed, model.dump(), trace_text(v.trace), v.str()};
}

/// Parses a record written by Counterexample::to_text.
inline Counterexample parse_counterexample(const std::string& text) {
  Counterexample c;
  std::istringstream is(text);
  std::string line;
  bool seen_seed = false;
  while (std::getline(is, line)) {
    auto field = [&](const std::string& key) -> std::optional<std::string> {
      if (line.rfind(key, 0) != 0) return std::nullopt;
      std::string rest = line.substr(key.size());
      return rest;
    };
    if (auto s = field("seed: ")) {
      c.seed = std::stoull(*s);
      seen_seed = true;
    } else if (auto t = field("trace:")) {
      c.trace = *t;
    } else if (auto v = field("verdict: ")) {
      c.verdict = *v;
    } else {
      c.model_dump += line + '\n';
    }
  }
  if (!seen_seed) throw std::invalid_argument("counterexample record has no seed");
  return c;
}

struct SampleReport {
  std::size_t trials = 0;
  std::size_t passes = 0;
  std::size_t vacuous = 0;
  std::size_t generator_invalid = 0;
  std::optional<Counterexample> counterexample;

  bool all_vacuous() const { return trials > 0 && vacuous == trials; }
};

/// Runs trials with seeds base_seed, base_seed + 1, ... and stops at the
/// first counterexample. Models that do not satisfy the pre are counted as
/// generator-invalid (and, being non-models, as vacuous passes).
inline SampleReport check_triple_sampled(const CaseGenerator& gen, std::size_t trials,
                                         std::uint64_t base_seed, const SatConfig& cfg = {}) {
  SampleReport r;
  for (std::size_t i = 0; i < trials; ++i) {
    std::uint64_t seed = base_seed + i;
    SampledCase c = gen(seed);
    ++r.trials;
    TripleVerdict v = check_triple(c.triple, c.model, cfg);
    if (v.vacuous) {
      ++r.vacuous;
      ++r.generator_invalid;
    }
    if (v.passed()) {
      ++r.passes;
      continue;
    }
    r.counterexample = make_counterexample(seed, c.model, v);
    break;
  }
  return r;
}

/// Regenerates the case from the recorded seed; true iff it reproduces the
/// same model and the same failing verdict.
inline bool replay(const CaseGenerator& gen, const Counterexample& cex, const SatConfig& cfg = {}) {
  SampledCase c = gen(cex.seed);
  TripleVerdict v = check_triple(c.triple, c.model, cfg);
  return !v.passed() && c.model.dump() == cex.model_dump && v.str() == cex.verdict &&
         trace_text(v.trace) == cex.trace;
}

}  // namespace timecredit
