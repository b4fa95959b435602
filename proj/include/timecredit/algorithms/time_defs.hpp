#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "timecredit/credit_calc.hpp"

namespace timecredit {

using Args = std::vector<Int>;

/// One guarded equation of a runtime function. Branches are tried in order;
/// the body refers to the parameters by name.
struct Branch {
  std::string guard_text;
  std::function<bool(const Args&)> guard;
  TimeExpr body;
};

struct TimeDef {
  std::string name;
  std::vector<std::string> params;
  std::vector<Branch> branches;
};

inline Branch when(std::string text, std::function<bool(const Args&)> g, TimeExpr body) {
  return {std::move(text), std::move(g), std::move(body)};
}
inline Branch otherwise(TimeExpr body) { return {"otherwise", [](const Args&) { return true; }, std::move(body)}; }

/// Table of runtime functions with memoized exact evaluation.
class TimeDefs {
 public:
  void add(TimeDef d) {
    memo_.clear();
    chain_cache_.clear();
    chain_step_.clear();
    std::string name = d.name;
    defs_[name] = std::move(d);
  }

  bool has(const std::string& f) const { return defs_.count(f) != 0; }
  const TimeDef& get(const std::string& f) const {
    auto it = defs_.find(f);
    if (it == defs_.end()) throw UnknownFunction(f);
    return it->second;
  }
  const std::map<std::string, TimeDef>& all() const { return defs_; }

  std::size_t branch_index(const std::string& f, const Args& a) const {
    const TimeDef& d = get(f);
    if (a.size() != d.params.size()) throw std::invalid_argument(f + ": wrong number of arguments");
    for (std::size_t i = 0; i < d.branches.size(); ++i) {
      if (d.branches[i].guard(a)) return i;
    }
    throw std::domain_error(f + ": no branch applies");
  }

  Env env(std::map<std::string, Int> vars) const {
    Env e;
    e.vars = std::move(vars);
    e.call = [this](const std::string& f, const std::vector<Int>& xs) { return eval(f, xs); };
    return e;
  }

  Int eval(const std::string& f, const Args& a) const {
    if (!a.empty() && affine_chain(f)) {
      // f(p, ...) = B + p * S, both evaluated with p absent.
      const TimeDef& d = get(f);
      std::map<std::string, Int> vars;
      for (std::size_t i = 1; i < d.params.size(); ++i) vars[d.params[i]] = a[i];
      Env e = env(std::move(vars));
      return eval_expr(d.branches[0].body, e) + a[0] * eval_expr(chain_step_.at(f), e);
    }
    auto& table = memo_[f];
    if (auto it = table.find(a); it != table.end()) return it->second;
    if (!a.empty() && a[0] > 64 && self_step(f)) {
      // Walk the first argument upwards so recursion on n - 1 stays shallow.
      Args b = a;
      Int start = a[0] - 64;
      for (Int k = start; k < a[0]; k += 64) {
        b[0] = k;
        eval(f, b);
      }
    }
    const TimeDef& d = get(f);
    std::map<std::string, Int> vars;
    for (std::size_t i = 0; i < d.params.size(); ++i) vars[d.params[i]] = a[i];
    Int v = eval_expr(d.branches[branch_index(f, a)].body, env(std::move(vars)));
    table.emplace(a, v);
    return v;
  }

  Int eval(const std::string& f, std::initializer_list<long long> a) const {
    Args xs;
    for (long long x : a) xs.emplace_back(x);
    return eval(f, xs);
  }

  /// Literal sites (definition, index within the concatenated branch bodies)
  /// holding a positive constant; these are the fault-injection targets.
  std::vector<std::pair<std::string, std::size_t>> literal_sites() const {
    std::vector<std::pair<std::string, std::size_t>> out;
    for (const auto& [name, d] : defs_) {
      std::size_t idx = 0;
      for (const auto& b : d.branches) {
        for (std::size_t i = 0; i < b.body.literal_count(); ++i, ++idx) {
          bool positive = false;
          b.body.map_literal(i, [&](const Int& x) {
            positive = x > 0;
            return x;
          });
          if (positive) out.emplace_back(name, idx);
        }
      }
    }
    return out;
  }

  /// Copy with the given literal decremented by one.
  TimeDefs with_fault(const std::string& f, std::size_t literal) const {
    TimeDefs out = *this;
    out.memo_.clear();
    out.chain_cache_.clear();
    out.chain_step_.clear();
    TimeDef& d = out.defs_.at(f);
    std::size_t idx = literal;
    for (auto& b : d.branches) {
      std::size_t n = b.body.literal_count();
      if (idx < n) {
        b.body = b.body.map_literal(idx, [](const Int& x) { return x > 0 ? Int(x - 1) : x; });
        return out;
      }
      idx -= n;
    }
    throw std::out_of_range("no literal " + std::to_string(literal) + " in " + f);
  }

 private:
  static bool mentions(const TimeExpr& e, const std::function<bool(const Term&)>& pred) {
    if (e.kind() == TimeExpr::Kind::Lit) return false;
    if (e.kind() == TimeExpr::Kind::Atom) {
      std::function<bool(const Term&)> walk = [&](const Term& t) {
        if (pred(t)) return true;
        for (const auto& x : t.args()) {
          if (walk(x)) return true;
        }
        return false;
      };
      return walk(e.atom());
    }
    return mentions(e.lhs(), pred) || mentions(e.rhs(), pred);
  }

  /// Recognizes "p = 0 -> B; otherwise S + f(p - 1, rest)" with B and S free
  /// of p and of f. Such loops evaluate in closed form, which keeps large
  /// arguments cheap.
  bool affine_chain(const std::string& f) const {
    auto it = chain_cache_.find(f);
    if (it != chain_cache_.end()) return it->second;
    bool ok = false;
    const TimeDef& d = get(f);
    if (!d.params.empty() && d.branches.size() == 2 && d.branches[0].guard_text == d.params[0] + " = 0" &&
        d.branches[1].body.kind() == TimeExpr::Kind::Add) {
      const std::string& p = d.params[0];
      std::vector<Term> rec{var(p) - nat(1)};
      for (std::size_t i = 1; i < d.params.size(); ++i) rec.push_back(var(d.params[i]));
      Term self = app(f, rec);
      const TimeExpr& body = d.branches[1].body;
      const TimeExpr *step = nullptr, *tail = nullptr;
      for (auto [x, y] : {std::pair{&body.lhs(), &body.rhs()}, std::pair{&body.rhs(), &body.lhs()}}) {
        if (y->kind() == TimeExpr::Kind::Atom && y->atom() == self) step = x, tail = y;
      }
      auto bad = [&](const Term& t) { return (t.kind() == Term::Kind::Var && t.name() == p) || t.name() == f; };
      if (step && tail && !mentions(*step, bad) && !mentions(d.branches[0].body, bad)) {
        chain_step_[f] = *step;
        ok = true;
      }
    }
    chain_cache_[f] = ok;
    return ok;
  }

  /// True when some branch calls f on (first param - 1): evaluation then
  /// warms the memo bottom-up to keep the host stack shallow.
  bool self_step(const std::string& f) const {
    auto it = step_cache_.find(f);
    if (it != step_cache_.end()) return it->second;
    const TimeDef& d = get(f);
    bool found = false;
    if (!d.params.empty()) {
      Term target = var(d.params[0]) - nat(1);
      std::function<void(const TimeExpr&)> scan = [&](const TimeExpr& e) {
        switch (e.kind()) {
          case TimeExpr::Kind::Lit: return;
          case TimeExpr::Kind::Atom:
            if (e.atom().kind() == Term::Kind::App && e.atom().name() == f && !e.atom().args().empty() &&
                e.atom().args()[0] == target) {
              found = true;
            }
            return;
          default:
            scan(e.lhs());
            scan(e.rhs());
        }
      };
      for (const auto& b : d.branches) scan(b.body);
    }
    step_cache_[f] = found;
    return found;
  }

  std::map<std::string, TimeDef> defs_;
  mutable std::map<std::string, std::map<Args, Int>> memo_;
  mutable std::map<std::string, bool> step_cache_;
  mutable std::map<std::string, bool> chain_cache_;
  mutable std::map<std::string, TimeExpr> chain_step_;
};

}  // namespace timecredit
