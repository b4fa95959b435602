#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "timecredit/term.hpp"

namespace timecredit {

/// Time expression tree: literals, atoms, and + / * / - over them.
class TimeExpr {
 public:
  enum class Kind { Lit, Atom, Add, Mul, Sub };

  TimeExpr() : TimeExpr(Int(0)) {}
  TimeExpr(Int k) : n_(std::make_shared<const Node>(Node{Kind::Lit, std::move(k), {}, {}, {}})) {}
  TimeExpr(int k) : TimeExpr(Int(k)) {}
  TimeExpr(Term t) : n_(std::make_shared<const Node>(Node{Kind::Atom, Int(0), std::move(t), {}, {}})) {}

  Kind kind() const { return n_->kind; }
  const Int& lit() const { return n_->lit; }
  const Term& atom() const { return n_->atom; }
  const TimeExpr& lhs() const { return *n_->lhs; }
  const TimeExpr& rhs() const { return *n_->rhs; }

  static TimeExpr binary(Kind k, const TimeExpr& a, const TimeExpr& b) {
    return TimeExpr(std::make_shared<const Node>(
        Node{k, Int(0), Term(), std::make_shared<TimeExpr>(a), std::make_shared<TimeExpr>(b)}));
  }

  /// Copy with the i-th literal (pre-order) replaced by f(literal).
  TimeExpr map_literal(std::size_t i, const std::function<Int(const Int&)>& f) const {
    std::size_t k = 0;
    return map_lit_impl(i, k, f);
  }
  std::size_t literal_count() const {
    switch (kind()) {
      case Kind::Lit: return 1;
      case Kind::Atom: return 0;
      default: return lhs().literal_count() + rhs().literal_count();
    }
  }

  std::string str() const {
    switch (kind()) {
      case Kind::Lit: return lit().str();
      case Kind::Atom: return atom().str();
      case Kind::Add: return lhs().str() + " + " + rhs().str();
      case Kind::Mul: return "(" + lhs().str() + ")*(" + rhs().str() + ")";
      case Kind::Sub: return "(" + lhs().str() + ") - (" + rhs().str() + ")";
    }
    return "";
  }

 private:
  struct Node {
    Kind kind;
    Int lit;
    Term atom;
    std::shared_ptr<TimeExpr> lhs, rhs;
  };
  explicit TimeExpr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

  TimeExpr map_lit_impl(std::size_t i, std::size_t& k, const std::function<Int(const Int&)>& f) const {
    switch (kind()) {
      case Kind::Lit: return k++ == i ? TimeExpr(f(lit())) : *this;
      case Kind::Atom: return *this;
      default: {
        TimeExpr a = lhs().map_lit_impl(i, k, f);
        TimeExpr b = rhs().map_lit_impl(i, k, f);
        return binary(kind(), a, b);
      }
    }
  }

  std::shared_ptr<const Node> n_;
};

inline TimeExpr operator+(const TimeExpr& a, const TimeExpr& b) { return TimeExpr::binary(TimeExpr::Kind::Add, a, b); }
inline TimeExpr operator*(const TimeExpr& a, const TimeExpr& b) { return TimeExpr::binary(TimeExpr::Kind::Mul, a, b); }
inline TimeExpr minus(const TimeExpr& a, const TimeExpr& b) { return TimeExpr::binary(TimeExpr::Kind::Sub, a, b); }
inline TimeExpr atom(const Term& t) { return TimeExpr(t); }

/// Atom for a call to a named runtime function.
template <class... Args>
TimeExpr call(const std::string& f, Args... args) {
  return TimeExpr(app(f, {Term(args)...}));
}

/// Evaluates an expression tree directly; subtraction truncates at zero.
inline Int eval_expr(const TimeExpr& e, const Env& env) {
  switch (e.kind()) {
    case TimeExpr::Kind::Lit: return e.lit();
    case TimeExpr::Kind::Atom: return eval_term(e.atom(), env);
    case TimeExpr::Kind::Add: return eval_expr(e.lhs(), env) + eval_expr(e.rhs(), env);
    case TimeExpr::Kind::Mul: return eval_expr(e.lhs(), env) * eval_expr(e.rhs(), env);
    case TimeExpr::Kind::Sub: {
      Int a = eval_expr(e.lhs(), env), b = eval_expr(e.rhs(), env);
      return a > b ? Int(a - b) : Int(0);
    }
  }
  return 0;
}

class NormalizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Normalized form c1*p1 + ... + cm*pm. The literal 1 is the constant atom.
class PolyForm {
 public:
  PolyForm() = default;

  static PolyForm constant(Int c) {
    PolyForm p;
    p.add(nat(1), std::move(c));
    return p;
  }
  static PolyForm of(const Term& t, Int c = 1) {
    PolyForm p;
    p.add(t, std::move(c));
    return p;
  }

  void add(const Term& t, const Int& c) {
    if (c == 0) return;
    terms_[t] += c;
  }
  void add(const PolyForm& o) {
    for (const auto& [t, c] : o.terms_) add(t, c);
  }
  PolyForm scaled(const Int& k) const {
    PolyForm p;
    for (const auto& [t, c] : terms_) p.add(t, c * k);
    return p;
  }

  /// Coefficient of t (structural).
  Int coeff(const Term& t) const {
    auto it = terms_.find(t);
    return it == terms_.end() ? Int(0) : it->second;
  }
  Int constant_part() const { return coeff(nat(1)); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one()); }
  bool empty() const { return terms_.empty(); }
  const std::map<Term, Int>& terms() const { return terms_; }
  std::map<Term, Int>& terms_mut() { return terms_; }

  /// Atoms in display order: the constant first, then by canonical text.
  std::vector<std::pair<Term, Int>> ordered() const {
    std::vector<std::pair<Term, Int>> out;
    auto one = terms_.find(nat(1));
    if (one != terms_.end()) out.push_back(*one);
    for (const auto& kv : terms_) {
      if (!kv.first.is_one()) out.push_back(kv);
    }
    return out;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [t, c] : ordered()) {
      if (!s.empty()) s += " + ";
      s += t.is_one() ? c.str() : c.str() + "*" + t.str();
    }
    return s;
  }

  TimeExpr to_expr() const {
    std::optional<TimeExpr> e;
    for (const auto& [t, c] : ordered()) {
      TimeExpr x = t.is_one() ? TimeExpr(c) : TimeExpr(c) * TimeExpr(t);
      e = e ? *e + x : x;
    }
    return e ? *e : TimeExpr(0);
  }

  friend bool operator==(const PolyForm& a, const PolyForm& b) { return a.terms_ == b.terms_; }

 private:
  std::map<Term, Int> terms_;
};

inline PolyForm normalize(const TimeExpr& e) {
  switch (e.kind()) {
    case TimeExpr::Kind::Lit: return PolyForm::constant(e.lit());
    case TimeExpr::Kind::Atom: {
      if (e.atom().kind() == Term::Kind::Nat) return PolyForm::constant(e.atom().value());
      return PolyForm::of(e.atom());
    }
    case TimeExpr::Kind::Add: {
      PolyForm p = normalize(e.lhs());
      p.add(normalize(e.rhs()));
      return p;
    }
    case TimeExpr::Kind::Mul: {
      PolyForm a = normalize(e.lhs()), b = normalize(e.rhs());
      if (a.is_constant()) return b.scaled(a.constant_part());
      if (b.is_constant()) return a.scaled(b.constant_part());
      throw NormalizeError("non-linear product: " + e.str());
    }
    case TimeExpr::Kind::Sub: throw NormalizeError("subtraction is outside the normal-form fragment: " + e.str());
  }
  return {};
}

inline Int eval(const PolyForm& p, const Env& env) {
  Int s = 0;
  for (const auto& [t, c] : p.terms()) s += c * eval_term(t, env);
  return s;
}

using Equations = std::vector<std::pair<Term, Term>>;

struct MatchFailure {
  Term term;
  Int coeff;
  std::vector<std::string> candidates;

  std::string str() const {
    std::string s = "no match for " + coeff.str() + "*" + term.str();
    if (!candidates.empty()) {
      s += "; candidates:";
      for (const auto& c : candidates) s += " " + c;
    }
    return s;
  }
};

using MatchResult = std::variant<PolyForm, MatchFailure>;

/// Finds T'' with T = T' + T''. Each term d*q of T' (display order) consumes
/// from the first atom p of the running remainder, in display order, with
/// p = q modulo the equations and coefficient at least d.
inline MatchResult subtract_match(const PolyForm& T, const PolyForm& Tp, CongruenceClosure& cc) {
  PolyForm rem = T;
  for (const auto& [q, d] : Tp.ordered()) {
    std::optional<Term> hit;
    std::vector<std::string> near;
    for (const auto& [p, c] : rem.ordered()) {
      bool same = p.is_one() ? q.is_one() : (!q.is_one() && cc.equal(p, q));
      if (same && c >= d) {
        hit = p;
        break;
      }
      bool related = same || (p.kind() == Term::Kind::App && q.kind() == Term::Kind::App && p.name() == q.name());
      if (related) near.push_back(c.str() + "*" + p.str());
    }
    if (!hit) return MatchFailure{q, d, near};
    Int& c = rem.terms_mut()[*hit];
    c -= d;
    if (c == 0) rem.terms_mut().erase(*hit);
  }
  return rem;
}

inline MatchResult subtract_match(const PolyForm& T, const PolyForm& Tp, const Equations& eqs = {}) {
  CongruenceClosure cc(eqs);
  return subtract_match(T, Tp, cc);
}

/// Certified inequality s >= t used to trade a credit term for a smaller one.
struct Hint {
  PolyForm s;
  PolyForm t;
  std::function<bool()> justification;
  std::string label;
};

class HintAbsent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class HintUnprovable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HintResult {
  PolyForm form;
  bool top_absorbing = true;  // surplus s - t was discarded
};

inline HintResult apply_hint(const PolyForm& T, const Hint& h, CongruenceClosure& cc) {
  MatchResult m = subtract_match(T, h.s, cc);
  if (std::holds_alternative<MatchFailure>(m)) {
    throw HintAbsent("hint " + h.label + ": " + h.s.str() + " not in " + T.str());
  }
  if (!h.justification || !h.justification()) {
    throw HintUnprovable("hint " + h.label + ": cannot certify " + h.s.str() + " >= " + h.t.str());
  }
  PolyForm out = std::get<PolyForm>(m);
  out.add(h.t);
  return {out, true};
}

inline HintResult apply_hint(const PolyForm& T, const Hint& h, const Equations& eqs = {}) {
  CongruenceClosure cc(eqs);
  return apply_hint(T, h, cc);
}

}  // namespace timecredit
