#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

#include "timecredit/algorithms/time_defs.hpp"
#include "timecredit/credit_calc.hpp"
#include "timecredit/machine.hpp"

namespace timecredit {

/// What a procedure body spends, in the order it spends it.
struct FrameEvent {
  enum class Kind { Prim, Call, Hint };
  Kind kind = Kind::Prim;
  TimeExpr demand;        // Prim / Call: credits requested; Hint: s
  TimeExpr weaker;        // Hint: t
  std::string label;      // Hint label or primitive name
  std::uint64_t actual = 0;  // Prim: cost charged by the machine
  std::size_t callee = 0;    // Call: index of the callee frame
};

/// One activation of a procedure with a runtime function.
struct FrameRecord {
  std::string fn;
  std::vector<std::string> params;
  std::map<std::string, Int> env;  // parameters and let-bound locals
  Equations eqs;
  std::vector<FrameEvent> events;
  std::uint64_t cost = 0;  // inclusive cost of the activation
  bool closed = false;

  Args args() const {
    Args a;
    for (const auto& p : params) a.push_back(env.at(p));
    return a;
  }
  std::string head() const {
    std::string s = fn + "(";
    for (std::size_t i = 0; i < params.size(); ++i) s += (i ? ", " : "") + env.at(params[i]).str();
    return s + ")";
  }
};

struct ObligationLog {
  std::vector<FrameRecord> frames;
};

/// Thin layer over Machine that, when given a log, records each frame's
/// credit demands symbolically. Without a log it only runs.
class Exec {
 public:
  explicit Exec(Machine& m, ObligationLog* log = nullptr) : m_(m), log_(log) {}

  Machine& machine() { return m_; }
  bool logging() const { return log_ != nullptr; }

  class Frame {
   public:
    Frame(const Frame&) = delete;
    Frame& operator=(const Frame&) = delete;
    Frame(Frame&& o) noexcept : ex_(o.ex_), idx_(o.idx_), start_(o.start_) { o.ex_ = nullptr; }
    ~Frame() { close(); }

    /// Late binding of a parameter, e.g. a recursion depth known on exit.
    void set(const std::string& name, const Int& v) {
      if (ex_ && ex_->log_) ex_->log_->frames[idx_].env[name] = v;
    }
    void close() {
      if (!ex_) return;
      if (ex_->log_) {
        auto& f = ex_->log_->frames[idx_];
        f.cost = ex_->m_.cost() - start_;
        f.closed = true;
        ex_->stack_.pop_back();
      }
      ex_ = nullptr;
    }

   private:
    friend class Exec;
    Frame(Exec* ex, std::size_t idx, std::uint64_t start) : ex_(ex), idx_(idx), start_(start) {}
    Exec* ex_;
    std::size_t idx_;
    std::uint64_t start_;
  };

  Frame frame(const std::string& fn, const std::vector<std::pair<std::string, Int>>& params) {
    if (!log_) return Frame(this, 0, m_.cost());
    FrameRecord r;
    r.fn = fn;
    for (const auto& [n, v] : params) {
      r.params.push_back(n);
      r.env[n] = v;
    }
    log_->frames.push_back(std::move(r));
    std::size_t idx = log_->frames.size() - 1;
    if (!stack_.empty() && pending_call_) {
      // Attach to the caller's open call event.
      auto& caller = log_->frames[stack_.back()];
      caller.events[*pending_call_].callee = idx;
      pending_call_.reset();
    }
    stack_.push_back(idx);
    return Frame(this, idx, m_.cost());
  }

  /// Local definition: adds name = def as an equation and binds its value.
  void let(const std::string& name, const Term& def, const Int& value) {
    if (!log_) return;
    auto& f = top();
    f.env[name] = value;
    f.eqs.emplace_back(var(name), def);
  }
  /// Binds a local that has no closed term (its value is only known at runtime).
  void bind(const std::string& name, const Int& value) {
    if (log_) top().env[name] = value;
  }

  void hint(const TimeExpr& s, const TimeExpr& t, const std::string& label) {
    if (!log_) return;
    FrameEvent e;
    e.kind = FrameEvent::Kind::Hint;
    e.demand = s;
    e.weaker = t;
    e.label = label;
    top().events.push_back(std::move(e));
  }

  /// Runs a callee; the demand is built after it returns so it may mention
  /// values the callee produced.
  template <class D, class F>
  auto call(D&& demand, F&& body) -> decltype(body()) {
    if (!log_) return body();
    std::size_t caller = stack_.back();
    FrameEvent e;
    e.kind = FrameEvent::Kind::Call;
    e.callee = SIZE_MAX;
    log_->frames[caller].events.push_back(e);
    std::size_t slot = log_->frames[caller].events.size() - 1;
    pending_call_ = slot;
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      log_->frames[caller].events[slot].demand = demand();
    } else {
      auto r = body();
      log_->frames[caller].events[slot].demand = demand();
      return r;
    }
  }

  // Unit-cost primitives.
  std::uint64_t len(Addr a) { return prim(unit(), "len", [&] { return m_.array_len(a); }); }
  Value nth(Addr a, std::uint64_t i) { return prim(unit(), "nth", [&] { return m_.array_nth(a, i); }); }
  void upd(Addr a, std::uint64_t i, Value v) {
    prim(unit(), "upd", [&] {
      m_.array_upd(a, i, std::move(v));
      return 0;
    });
  }
  Value ret(Value v = Unit{}) { return prim(unit(), "ret", [&] { return m_.ret(std::move(v)); }); }
  Addr ref_new(Value v) { return prim(unit(), "ref", [&] { return m_.ref_new(std::move(v)); }); }
  Value ref_read(Addr a) { return prim(unit(), "!", [&] { return m_.ref_read(a); }); }
  void ref_write(Addr a, Value v) {
    prim(unit(), ":=", [&] {
      m_.ref_write(a, std::move(v));
      return 0;
    });
  }

  // Whole-array primitives carry their demand explicitly.
  Addr array_new(std::uint64_t n, const Value& x, const TimeExpr& d) {
    return prim(d, "array_new", [&] { return m_.array_new(n, x); });
  }
  Addr array_of_list(ValueList xs, const TimeExpr& d) {
    return prim(d, "array_of_list", [&] { return m_.array_of_list(std::move(xs)); });
  }
  ValueList array_to_list(Addr a, const TimeExpr& d) {
    return prim(d, "array_to_list", [&] { return m_.array_to_list(a); });
  }
  Addr atake(std::uint64_t k, Addr a, const TimeExpr& d) {
    return prim(d, "atake", [&] { return m_.atake(k, a); });
  }
  Addr adrop(std::uint64_t k, Addr a, const TimeExpr& d) {
    return prim(d, "adrop", [&] { return m_.adrop(k, a); });
  }

 private:
  static const TimeExpr& unit() {
    static const TimeExpr one(1);
    return one;
  }
  FrameRecord& top() { return log_->frames[stack_.back()]; }

  template <class F>
  auto prim(const TimeExpr& d, const char* name, F&& f) -> decltype(f()) {
    std::uint64_t before = m_.cost();
    auto r = f();
    if (log_ && !stack_.empty()) {
      FrameEvent e;
      e.kind = FrameEvent::Kind::Prim;
      e.demand = d;
      e.label = name;
      e.actual = m_.cost() - before;
      top().events.push_back(std::move(e));
    }
    return r;
  }

  Machine& m_;
  ObligationLog* log_;
  std::vector<std::size_t> stack_;
  std::optional<std::size_t> pending_call_;
};

/// Result of auditing a log against a table of runtime functions.
struct AuditReport {
  std::size_t frames = 0;
  std::size_t demands = 0;
  std::map<std::string, std::size_t> hints_used;  // label -> applications
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
  std::set<std::string> hint_labels() const {
    std::set<std::string> s;
    for (const auto& kv : hints_used) s.insert(kv.first);
    return s;
  }
};

/// Checks every frame of the log:
///  - each primitive demand evaluates to the cost actually charged;
///  - each call demand evaluates to the callee's runtime function value;
///  - the frame's cost is within its runtime function;
///  - symbolically, the frame's demands are matched out of the selected
///    branch of its runtime function (subtract_match, hints in place).
inline AuditReport audit(const ObligationLog& log, const TimeDefs& defs, std::size_t max_failures = 20) {
  AuditReport rep;
  auto fail = [&](std::string s) {
    if (rep.failures.size() < max_failures) rep.failures.push_back(std::move(s));
  };
  for (const auto& f : log.frames) {
    ++rep.frames;
    if (!f.closed) {
      fail(f.fn + ": frame not closed");
      continue;
    }
    const TimeDef* def = nullptr;
    try {
      def = &defs.get(f.fn);
    } catch (const UnknownFunction&) {
      fail(f.fn + ": no runtime function");
      continue;
    }
    if (def->params != f.params) {
      fail(f.head() + ": parameter names differ from the runtime function");
      continue;
    }
    Args args = f.args();
    Env env = defs.env(f.env);
    Int bound = defs.eval(f.fn, args);
    if (Int(f.cost) > bound) fail(f.head() + ": cost " + std::to_string(f.cost) + " exceeds bound " + bound.str());

    PolyForm T;
    try {
      T = normalize(def->branches[defs.branch_index(f.fn, args)].body);
    } catch (const std::exception& e) {
      fail(f.head() + ": " + e.what());
      continue;
    }
    CongruenceClosure cc(f.eqs);
    bool broken = false;
    for (const auto& e : f.events) {
      if (broken) break;
      if (e.kind == FrameEvent::Kind::Hint) {
        Hint h;
        h.s = normalize(e.demand);
        h.t = normalize(e.weaker);
        h.label = e.label;
        h.justification = [&] { return eval(h.s, env) >= eval(h.t, env); };
        try {
          T = apply_hint(T, h, cc).form;
          ++rep.hints_used[e.label];
        } catch (const std::exception& ex) {
          fail(f.head() + ": " + ex.what());
          broken = true;
        }
        continue;
      }
      ++rep.demands;
      Int want = eval_expr(e.demand, env);
      if (e.kind == FrameEvent::Kind::Prim && want != Int(e.actual)) {
        fail(f.head() + ": " + e.label + " demand " + e.demand.str() + " = " + want.str() + " but cost " +
             std::to_string(e.actual));
      }
      if (e.kind == FrameEvent::Kind::Call) {
        if (e.callee >= log.frames.size()) {
          fail(f.head() + ": call without a callee frame");
        } else {
          const auto& c = log.frames[e.callee];
          Int cb = defs.eval(c.fn, c.args());
          if (cb != want) {
            fail(f.head() + ": call demand " + e.demand.str() + " = " + want.str() + " but " + c.head() + " = " +
                 cb.str());
          }
        }
      }
      MatchResult r = subtract_match(T, normalize(e.demand), cc);
      if (auto* mf = std::get_if<MatchFailure>(&r)) {
        fail(f.head() + " [" + T.str() + "]: " + mf->str());
        broken = true;
      } else {
        T = std::get<PolyForm>(r);
      }
    }
  }
  return rep;
}

}  // namespace timecredit
