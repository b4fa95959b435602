#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "timecredit/value.hpp"

namespace timecredit {

/// First-order term over naturals: variables, literals, and applications of
/// either arithmetic builtins (+, -, *, div, cdiv) or named runtime functions.
/// Terms are hash-consed by their canonical text, which also orders them.
class Term {
 public:
  enum class Kind { Var, Nat, App };

  Term() : Term(nat(0)) {}

  static Term var(std::string name) {
    return Term(std::make_shared<const Node>(Node{Kind::Var, name, Int(0), {}, name}));
  }
  static Term nat(Int k) {
    std::string t = k.str();
    return Term(std::make_shared<const Node>(Node{Kind::Nat, {}, std::move(k), {}, std::move(t)}));
  }
  static Term app(std::string fn, std::vector<Term> args) {
    std::string t = render(fn, args);
    return Term(std::make_shared<const Node>(Node{Kind::App, std::move(fn), Int(0), std::move(args), std::move(t)}));
  }

  Kind kind() const { return n_->kind; }
  const std::string& name() const { return n_->name; }
  const Int& value() const { return n_->value; }
  const std::vector<Term>& args() const { return n_->args; }
  const std::string& str() const { return n_->text; }

  bool is_builtin() const { return kind() == Kind::App && is_builtin_name(name()); }
  bool is_one() const { return kind() == Kind::Nat && value() == 1; }

  static bool is_builtin_name(const std::string& f) {
    return f == "+" || f == "-" || f == "*" || f == "div" || f == "cdiv";
  }

  friend bool operator==(const Term& a, const Term& b) { return a.str() == b.str(); }
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
  friend bool operator<(const Term& a, const Term& b) { return a.str() < b.str(); }

 private:
  struct Node {
    Kind kind;
    std::string name;
    Int value;
    std::vector<Term> args;
    std::string text;
  };

  explicit Term(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

  static std::string render(const std::string& fn, const std::vector<Term>& args) {
    if ((fn == "+" || fn == "-" || fn == "*" || fn == "div") && args.size() == 2) {
      return "(" + args[0].str() + " " + fn + " " + args[1].str() + ")";
    }
    std::string s = fn + "(";
    for (std::size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + args[i].str();
    return s + ")";
  }

  std::shared_ptr<const Node> n_;
};

inline Term var(std::string name) { return Term::var(std::move(name)); }
inline Term nat(Int k) { return Term::nat(std::move(k)); }
inline Term app(std::string fn, std::vector<Term> args) { return Term::app(std::move(fn), std::move(args)); }
inline Term operator+(const Term& a, const Term& b) { return app("+", {a, b}); }
inline Term operator-(const Term& a, const Term& b) { return app("-", {a, b}); }
inline Term operator*(const Term& a, const Term& b) { return app("*", {a, b}); }
inline Term tdiv(const Term& a, const Term& b) { return app("div", {a, b}); }
inline Term tcdiv(const Term& a, const Term& b) { return app("cdiv", {a, b}); }

class UnknownFunction : public std::runtime_error {
 public:
  explicit UnknownFunction(const std::string& f) : std::runtime_error("unknown function " + f), name(f) {}
  std::string name;
};

/// Assignment of naturals to variables and of meanings to named functions.
struct Env {
  std::map<std::string, Int> vars;
  std::function<Int(const std::string&, const std::vector<Int>&)> call;
};

inline Int eval_builtin(const std::string& f, const std::vector<Int>& a) {
  if (a.size() != 2) throw std::invalid_argument("builtin " + f + " takes two arguments");
  if (f == "+") return a[0] + a[1];
  if (f == "*") return a[0] * a[1];
  if (f == "-") return a[0] > a[1] ? Int(a[0] - a[1]) : Int(0);  // truncated
  if (a[1] == 0) throw std::domain_error("division by zero");
  if (f == "div") return a[0] / a[1];
  if (f == "cdiv") return (a[0] + a[1] - 1) / a[1];
  throw std::invalid_argument("not a builtin: " + f);
}

inline Int eval_term(const Term& t, const Env& env) {
  switch (t.kind()) {
    case Term::Kind::Nat: return t.value();
    case Term::Kind::Var: {
      auto it = env.vars.find(t.name());
      if (it == env.vars.end()) throw std::invalid_argument("unbound variable " + t.name());
      return it->second;
    }
    case Term::Kind::App: {
      std::vector<Int> xs;
      xs.reserve(t.args().size());
      for (const Term& a : t.args()) xs.push_back(eval_term(a, env));
      if (t.is_builtin()) return eval_builtin(t.name(), xs);
      if (!env.call) throw UnknownFunction(t.name());
      return env.call(t.name(), xs);
    }
  }
  return 0;
}

/// Congruence closure over a finite set of ground equations. Terms not seen
/// at construction are added on demand; closure is recomputed lazily.
class CongruenceClosure {
 public:
  CongruenceClosure() = default;
  explicit CongruenceClosure(const std::vector<std::pair<Term, Term>>& eqs) {
    for (const auto& [a, b] : eqs) {
      add(a);
      add(b);
      unite(id(a), id(b));
    }
    close();
  }

  bool equal(const Term& a, const Term& b) {
    if (a == b) return true;
    bool fresh = !ids_.count(a.str()) || !ids_.count(b.str());
    add(a);
    add(b);
    if (fresh) close();
    return find(id(a)) == find(id(b));
  }

 private:
  void add(const Term& t) {
    if (ids_.count(t.str())) return;
    for (const Term& a : t.args()) add(a);
    ids_.emplace(t.str(), terms_.size());
    terms_.push_back(t);
    parent_.push_back(parent_.size());
  }
  std::size_t id(const Term& t) const { return ids_.at(t.str()); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }
  void close() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < terms_.size(); ++i) {
        for (std::size_t j = i + 1; j < terms_.size(); ++j) {
          if (find(i) == find(j)) continue;
          const Term &s = terms_[i], &t = terms_[j];
          if (s.kind() != Term::Kind::App || t.kind() != Term::Kind::App) continue;
          if (s.name() != t.name() || s.args().size() != t.args().size()) continue;
          bool same = true;
          for (std::size_t k = 0; k < s.args().size() && same; ++k) {
            same = find(id(s.args()[k])) == find(id(t.args()[k]));
          }
          if (same) changed |= unite(i, j);
        }
      }
    }
  }

  std::map<std::string, std::size_t> ids_;
  std::vector<Term> terms_;
  std::vector<std::size_t> parent_;
};

}  // namespace timecredit
