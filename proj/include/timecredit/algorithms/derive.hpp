#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "timecredit/algorithms/time_defs.hpp"
#include "timecredit/landau.hpp"
#include "timecredit/recurrence.hpp"

namespace timecredit {

class DerivationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How a runtime function's class was obtained.
struct Derivation {
  std::string fn;
  std::string method;  // "closed form", "linear recurrence", "divide and conquer", "registered"
  LandauClass cls;
  std::optional<AkraBazziSpec> spec;
  std::optional<AkraBazziResult> ab;
};

namespace derive_detail {

using Degrees = std::vector<unsigned>;

/// Structural degree of an arithmetic term in each parameter.
inline Degrees degrees(const Term& t, const std::vector<std::string>& params) {
  Degrees d(params.size(), 0);
  switch (t.kind()) {
    case Term::Kind::Nat: return d;
    case Term::Kind::Var:
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i] == t.name()) {
          d[i] = 1;
          return d;
        }
      }
      throw DerivationError("unknown variable " + t.name());
    case Term::Kind::App: break;
  }
  if (!t.is_builtin()) throw DerivationError("call inside an argument: " + t.str());
  Degrees l = degrees(t.args()[0], params), r = degrees(t.args()[1], params);
  const std::string& op = t.name();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (op == "*") {
      d[i] = l[i] + r[i];
    } else if (op == "div" || op == "cdiv") {
      if (r[i]) throw DerivationError("division by a variable: " + t.str());
      d[i] = l[i];
    } else {
      d[i] = std::max(l[i], r[i]);
    }
  }
  return d;
}

inline long double mono_value(const Degrees& d, const std::vector<std::uint64_t>& x) {
  long double v = 1;
  for (std::size_t i = 0; i < d.size(); ++i) v *= std::pow(static_cast<long double>(x[i]), d[i]);
  return v;
}

/// Sample points for the numeric checks: powers of two per axis.
inline std::vector<std::vector<std::uint64_t>> grid(std::size_t arity) {
  std::vector<std::vector<std::uint64_t>> pts;
  if (arity == 0) return {{}};
  if (arity == 1) {
    for (unsigned k = 4; k <= 24; ++k) pts.push_back({std::uint64_t{1} << k});
    return pts;
  }
  for (unsigned a = 4; a <= 16; a += 2) {
    for (unsigned b = 4; b <= 16; b += 2) pts.push_back({std::uint64_t{1} << a, std::uint64_t{1} << b});
  }
  return pts;
}

}  // namespace derive_detail

/// Reproduces the Theta class of runtime functions from their definitions:
/// sums of known classes go through the absorption calculus, self calls on
/// p - 1 through the linear-recurrence rule, and self calls on fractions of n
/// through the Akra-Bazzi solver. Derived classes enter the registry.
class Deriver {
 public:
  Deriver(const TimeDefs& defs, BoundRegistry& reg) : defs_(std::make_shared<TimeDefs>(defs)), reg_(reg) {}

  const Derivation& derive(const std::string& f) {
    if (auto it = done_.find(f); it != done_.end()) return it->second;
    if (reg_.contains(f)) {
      const BoundEntry& e = reg_.lookup(f);
      return done_[f] = Derivation{f, "registered", e.cls, {}, {}};
    }
    if (!active_.insert(f).second) throw DerivationError("mutual recursion through " + f);
    Derivation d;
    try {
      d = derive_fresh(f);
    } catch (...) {
      active_.erase(f);
      throw;
    }
    active_.erase(f);
    if (auto* p = std::get_if<PolyLog>(&d.cls)) reg_.declare(f, *p, "derived");
    if (auto* c = std::get_if<Class2>(&d.cls)) reg_.declare(f, *c, "derived");
    return done_[f] = std::move(d);
  }

  const TimeDefs& defs() const { return *defs_; }

 private:
  struct Split {
    std::vector<std::pair<Term, Int>> self;  // self calls with coefficients
    PolyForm rest;
  };

  Split split(const TimeDef& d) const {
    Split s;
    PolyForm body = normalize(d.branches.back().body);
    for (const auto& [t, c] : body.terms()) {
      if (t.kind() == Term::Kind::App && t.name() == d.name) {
        s.self.emplace_back(t, c);
      } else {
        s.rest.add(t, c);
      }
    }
    return s;
  }

  /// Argument term as an InnerArg; nullopt for a constant argument.
  std::optional<InnerArg> inner_arg(const Term& t, const TimeDef& d) const {
    auto deg = derive_detail::degrees(t, d.params);
    unsigned total = 0, var = 0;
    for (std::size_t i = 0; i < deg.size(); ++i) {
      total += deg[i];
      if (deg[i]) var = static_cast<unsigned>(i);
    }
    if (total == 0) return std::nullopt;
    if (total != 1) throw NonLinearArgument("argument is not linear: " + t.str());
    verify_order(t, deg, d);
    return InnerArg::affine(var);
  }

  /// The term stays within a constant factor of its structural monomial.
  void verify_order(const Term& t, const derive_detail::Degrees& deg, const TimeDef& d) const {
    long double lo = 0, hi = 0;
    bool first = true;
    for (const auto& x : derive_detail::grid(d.params.size())) {
      std::map<std::string, Int> vars;
      for (std::size_t i = 0; i < x.size(); ++i) vars[d.params[i]] = Int(x[i]);
      long double v = eval_term(t, defs_->env(vars)).convert_to<long double>();
      long double r = v / derive_detail::mono_value(deg, x);
      lo = first ? r : std::min(lo, r);
      hi = first ? r : std::max(hi, r);
      first = false;
    }
    if (!(lo > 0) || hi / lo > 4) throw DerivationError("term " + t.str() + " is not of its structural order");
  }

  AsymExpr asym(const PolyForm& p, const TimeDef& d) {
    AsymExpr e;
    e.arity = d.params.size() == 2 ? 2 : 1;
    for (const auto& [t, c] : p.terms()) {
      Summand s;
      s.coeff = c.convert_to<unsigned long long>();
      if (t.kind() == Term::Kind::Nat) {
        // constant
      } else if (!t.is_builtin() && t.kind() == Term::Kind::App) {
        std::vector<InnerArg> args;
        for (const auto& a : t.args()) {
          if (auto ia = inner_arg(a, d)) args.push_back(*ia);
        }
        if (!args.empty()) {
          if (args.size() != t.args().size()) throw DerivationError("mixed constant and variable arguments in " + t.str());
          derive(t.name());
          s.call = Summand::Call{t.name(), args};
        }
      } else {
        auto deg = derive_detail::degrees(t, d.params);
        verify_order(t, deg, d);
        s.monomial.assign(deg.begin(), deg.end());
      }
      e.summands.push_back(s);
    }
    if (e.summands.empty()) e.summands.push_back(Summand{0, {}, {}});
    return e;
  }

  LandauClass sum_class(const PolyForm& p, const TimeDef& d) {
    AsymExpr e = asym(p, d);
    bool live = false;
    for (const auto& s : e.summands) live |= s.coeff != 0;
    if (!live) return PolyLog{0, 0};
    return analyze_expr(e, reg_);
  }

  Derivation derive_fresh(const std::string& f) {
    const TimeDef& d = defs_->get(f);
    if (d.params.size() > 2) throw DerivationError(f + ": more than two parameters");
    Split s = split(d);
    if (s.self.empty()) return {f, "closed form", sum_class(s.rest, d), {}, {}};

    std::vector<Term> step{var(d.params[0]) - nat(1)};
    for (std::size_t i = 1; i < d.params.size(); ++i) step.push_back(var(d.params[i]));
    if (s.self.size() == 1 && s.self[0].first == app(f, step) && s.self[0].second == 1) return linear(d, s);
    return divide_and_conquer(d, s);
  }

  Derivation linear(const TimeDef& d, const Split& s) {
    LandauClass g = sum_class(s.rest, d);
    LinearRecSpec spec;
    if (d.params.size() == 1) {
      spec.arity = 1;
      spec.g = std::get<PolyLog>(g);
    } else {
      const Class2& c = std::get<Class2>(g);
      if (c.members.size() != 1 || c.members[0].a || c.members[0].b) {
        throw DerivationError(d.name + ": the step cost depends on the recursion variable");
      }
      spec.arity = 2;
      spec.g = c.members[0].second();
    }
    return {d.name, "linear recurrence", linear_rec_class(spec), {}, {}};
  }

  Derivation divide_and_conquer(const TimeDef& d, const Split& s) {
    if (d.params.size() != 1) throw DerivationError(d.name + ": divide and conquer needs one parameter");
    const std::string& p = d.params[0];
    auto at = [&](const Term& t, std::uint64_t x) {
      return eval_term(t, defs_->env({{p, Int(x)}})).convert_to<std::uint64_t>();
    };
    constexpr std::uint64_t kRange = 4096;

    AkraBazziSpec spec;
    spec.name = d.name;
    // The general branch applies from x0 on.
    std::uint64_t x0 = kRange;
    std::size_t last = d.branches.size() - 1;
    while (x0 > 0 && defs_->branch_index(d.name, {Int(x0 - 1)}) == last) --x0;
    spec.x0 = std::max<std::uint64_t>(x0, 1);

    for (const auto& [call_term, coeff] : s.self) {
      if (call_term.args().size() != 1) throw DerivationError(d.name + ": self call arity");
      const Term& arg = call_term.args()[0];
      // b from the ratio at a large point, snapped to a small-denominator fraction.
      constexpr std::uint64_t big = std::uint64_t{1} << 30;
      long double ratio = static_cast<long double>(at(arg, big)) / big;
      std::optional<Rational> b;
      for (long long q = 1; q <= 20 && !b; ++q) {
        long long num = std::llround(ratio * q);
        if (num > 0 && num < q && std::abs(ratio - static_cast<long double>(num) / q) < 1e-6L) b = Rational(num, q);
      }
      if (!b) throw DerivationError(d.name + ": argument " + arg.str() + " is not a fixed fraction of " + p);
      bool is_floor = true, is_ceil = true;
      for (std::uint64_t x = spec.x0; x <= kRange; ++x) {
        std::uint64_t y = at(arg, x);
        is_floor &= y == ABTerm{1, *b, Rounding::Floor}.apply(x);
        is_ceil &= y == ABTerm{1, *b, Rounding::Ceil}.apply(x);
        if (y >= x) throw DerivationError(d.name + ": self call does not shrink at " + std::to_string(x));
      }
      if (!is_floor && !is_ceil) throw DerivationError(d.name + ": argument " + arg.str() + " rounds neither way");
      spec.terms.push_back({Rational(coeff), *b, is_floor ? Rounding::Floor : Rounding::Ceil});
    }

    LandauClass g = sum_class(s.rest, d);
    auto* gp = std::get_if<PolyLog>(&g);
    if (!gp) throw DerivationError(d.name + ": toll class is not a polylog");
    spec.g_class = *gp;
    auto defs = defs_;
    PolyForm rest = s.rest;
    spec.g_concrete = [defs, rest, p](std::uint64_t x) { return Rational(eval(rest, defs->env({{p, Int(x)}}))); };
    for (std::uint64_t x = 0; x < spec.x0; ++x) spec.base[x] = Rational(defs_->eval(d.name, {Int(x)}));

    AkraBazziResult r = akra_bazzi_class(spec);
    return {d.name, "divide and conquer", r.result_class, spec, r};
  }

  std::shared_ptr<TimeDefs> defs_;
  BoundRegistry& reg_;
  std::map<std::string, Derivation> done_;
  std::set<std::string> active_;
};

}  // namespace timecredit
