#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "timecredit/landau.hpp"
#include "timecredit/value.hpp"

namespace timecredit {

using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q" or an integer literal; rejects anything else.
inline Rational parse_rational(const std::string& s) {
  auto bad = [&] { return std::invalid_argument("not a rational: '" + s + "'"); };
  auto parse_int = [&](const std::string& t) {
    if (t.empty()) throw bad();
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) throw bad();
    for (std::size_t j = i; j < t.size(); ++j) {
      if (t[j] < '0' || t[j] > '9') throw bad();
    }
    return boost::multiprecision::cpp_int(t[0] == '+' ? t.substr(1) : t);
  };
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(parse_int(s));
  auto den = parse_int(s.substr(slash + 1));
  if (den == 0) throw bad();
  return Rational(parse_int(s.substr(0, slash)), den);
}

inline long double to_ld(const Rational& r) { return r.convert_to<long double>(); }

enum class Rounding { Ceil, Floor };

struct ABTerm {
  Rational a;
  Rational b;
  Rounding round = Rounding::Floor;

  std::uint64_t apply(std::uint64_t x) const {
    Rational bx = b * x;
    Int q = boost::multiprecision::numerator(bx) / boost::multiprecision::denominator(bx);
    if (round == Rounding::Ceil && Rational(q) != bx) q += 1;
    return q.convert_to<std::uint64_t>();
  }
};

/// f(x) = g(x) + sum a_i f(h_i(x)) for x >= x0, base values below x0.
struct AkraBazziSpec {
  std::string name;
  std::uint64_t x0 = 2;
  std::vector<ABTerm> terms;
  PolyLog g_class;
  std::function<Rational(std::uint64_t)> g_concrete;
  std::map<std::uint64_t, Rational> base;
};

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class RootOutOfRange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class MissingBase : public std::runtime_error {
 public:
  explicit MissingBase(std::uint64_t k) : std::runtime_error("no base value for n = " + std::to_string(k)), n(k) {}
  std::uint64_t n;
};

inline void validate(const AkraBazziSpec& s) {
  if (s.terms.empty()) throw InvalidSpec("recurrence has no terms");
  bool some_positive = false;
  for (const auto& t : s.terms) {
    if (t.a < 0) throw InvalidSpec("negative coefficient a");
    if (t.b <= 0 || t.b >= 1) throw InvalidSpec("b must lie strictly between 0 and 1");
    some_positive |= t.a > 0;
    // h(x) < x must hold from x0 on; past x0 + 1/(1-b) + 1 it always does.
    long double reach = 1.0L / (1.0L - to_ld(t.b)) + 2;
    for (std::uint64_t x = s.x0; x <= s.x0 + static_cast<std::uint64_t>(reach); ++x) {
      if (t.apply(x) >= x) throw InvalidSpec("recursive argument does not shrink at x = " + std::to_string(x));
    }
  }
  if (!some_positive) throw InvalidSpec("at least one coefficient must be positive");
}

inline long double phi(const AkraBazziSpec& s, long double p) {
  long double v = -1;
  for (const auto& t : s.terms) v += to_ld(t.a) * std::pow(to_ld(t.b), p);
  return v;
}

constexpr long double kBracketLo = -32, kBracketHi = 32;
constexpr long double kResidualTol = 1e-9L;
constexpr long double kBalancedTol = 1e-6L;

/// Root of sum a_i b_i^p = 1 by bisection on [-32, 32].
inline long double solve_exponent(const AkraBazziSpec& s) {
  validate(s);
  long double lo = kBracketLo, hi = kBracketHi;
  if (!(phi(s, lo) > 0 && phi(s, hi) < 0)) throw RootOutOfRange("phi does not change sign on [-32, 32]");
  // phi must decrease through the bracket.
  long double prev = phi(s, lo);
  for (int i = 1; i <= 17; ++i) {
    long double x = lo + (hi - lo) * i / 17;
    long double v = phi(s, x);
    if (v > prev) throw InvalidSpec("phi is not decreasing");
    prev = v;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15L; ++it) {
    long double mid = (lo + hi) / 2;
    (phi(s, mid) > 0 ? lo : hi) = mid;
  }
  long double p = (lo + hi) / 2;
  if (std::abs(phi(s, p)) > kResidualTol) throw RootOutOfRange("residual above tolerance");
  return p;
}

enum class CaseTag { BottomHeavy, Balanced, TopHeavy };

inline const char* case_name(CaseTag c) {
  switch (c) {
    case CaseTag::BottomHeavy: return "BottomHeavy";
    case CaseTag::Balanced: return "Balanced";
    case CaseTag::TopHeavy: return "TopHeavy";
  }
  return "?";
}

struct AkraBazziResult {
  long double p = 0;
  CaseTag case_tag = CaseTag::Balanced;
  LandauClass result_class;
  long double residual = 0;
};

/// Closest fraction with denominator up to max_den, as "k/d".
inline std::string nearest_rational(long double x, unsigned max_den = 64) {
  long double best_err = 1e30L;
  long long bn = 0, bd = 1;
  for (unsigned d = 1; d <= max_den; ++d) {
    long long n = std::llround(x * d);
    long double err = std::abs(x - static_cast<long double>(n) / d);
    if (err + 1e-15L < best_err) {
      best_err = err;
      bn = n;
      bd = d;
    }
  }
  return bd == 1 ? std::to_string(bn) : std::to_string(bn) + "/" + std::to_string(bd);
}

/// Exact memoized evaluation of an Akra-Bazzi recurrence.
class RecurrenceEvaluator {
 public:
  explicit RecurrenceEvaluator(AkraBazziSpec s) : spec_(std::move(s)) {
    if (!spec_.g_concrete) throw InvalidSpec("evaluation needs a concrete toll function");
    validate(spec_);
  }

  const Rational& operator()(std::uint64_t n) {
    if (auto it = memo_.find(n); it != memo_.end()) return it->second;
    std::vector<std::uint64_t> stack{n};
    while (!stack.empty()) {
      std::uint64_t x = stack.back();
      if (memo_.count(x)) {
        stack.pop_back();
        continue;
      }
      if (x < spec_.x0) {
        auto b = spec_.base.find(x);
        if (b == spec_.base.end()) throw MissingBase(x);
        memo_.emplace(x, b->second);
        stack.pop_back();
        continue;
      }
      bool ready = true;
      for (const auto& t : spec_.terms) {
        std::uint64_t y = t.apply(x);
        if (!memo_.count(y)) {
          stack.push_back(y);
          ready = false;
        }
      }
      if (!ready) continue;
      Rational v = spec_.g_concrete(x);
      for (const auto& t : spec_.terms) v += t.a * memo_.at(t.apply(x));
      memo_.emplace(x, std::move(v));
      stack.pop_back();
    }
    return memo_.at(n);
  }

  const AkraBazziSpec& spec() const { return spec_; }

 private:
  AkraBazziSpec spec_;
  std::map<std::uint64_t, Rational> memo_;
};

inline Rational eval_recurrence(const AkraBazziSpec& s, std::uint64_t n) {
  RecurrenceEvaluator ev(s);
  return ev(n);
}

struct RatioCheck {
  long double min_ratio = 0;
  long double max_ratio = 0;
  long double slack = 0;
  bool pass = false;
};

/// 8 for classes with a log factor (every balanced result has one), else 4.
inline long double default_slack(const LandauClass& cls) {
  bool has_log = false;
  if (auto* g = std::get_if<PolyLog>(&cls)) has_log = g->b > 0;
  if (auto* r = std::get_if<RealPower>(&cls)) has_log = r->b > 0;
  return has_log ? 8.0L : 4.0L;
}

/// f(n) / class(n) over n = 2^lo .. 2^hi; passes if max/min stays within slack.
inline RatioCheck empirical_ratio_check(RecurrenceEvaluator& ev, const LandauClass& cls, unsigned lo_exp,
                                        unsigned hi_exp, std::optional<long double> slack = std::nullopt) {
  RatioCheck rc;
  rc.slack = slack ? *slack : default_slack(cls);
  bool first = true;
  for (unsigned k = lo_exp; k <= hi_exp; ++k) {
    for (std::uint64_t n : {std::uint64_t{1} << k, (std::uint64_t{3} << k) / 2}) {
      if (k == hi_exp && n != (std::uint64_t{1} << k)) continue;
      long double r = to_ld(ev(n)) / class_value(cls, static_cast<long double>(n));
      if (first) {
        rc.min_ratio = rc.max_ratio = r;
        first = false;
      }
      rc.min_ratio = std::min(rc.min_ratio, r);
      rc.max_ratio = std::max(rc.max_ratio, r);
    }
  }
  rc.pass = rc.min_ratio > 0 && rc.max_ratio / rc.min_ratio <= rc.slack;
  return rc;
}

inline AkraBazziResult akra_bazzi_class(const AkraBazziSpec& s) {
  AkraBazziResult r;
  r.p = solve_exponent(s);
  r.residual = std::abs(phi(s, r.p));
  long double q = s.g_class.a;
  if (std::abs(q - r.p) <= kBalancedTol) {
    r.case_tag = CaseTag::Balanced;
    r.result_class = PolyLog{s.g_class.a, s.g_class.b + 1};
    return r;
  }
  if (s.g_class.b != 0) {
    throw InvalidSpec("log factor in the toll is only supported in the balanced case");
  }
  if (q > r.p) {
    r.case_tag = CaseTag::TopHeavy;
    r.result_class = s.g_class;
    return r;
  }
  r.case_tag = CaseTag::BottomHeavy;
  // Side condition: f eventually positive, checked on the evaluable range.
  if (s.g_concrete) {
    RecurrenceEvaluator ev(s);
    for (unsigned k = 1; k <= 20; ++k) {
      std::uint64_t n = std::max<std::uint64_t>(s.x0, std::uint64_t{1} << k);
      if (ev(n) <= 0) throw InvalidSpec("bottom-heavy case needs f > 0; f(" + std::to_string(n) + ") <= 0");
    }
  }
  long double rounded = std::round(r.p);
  if (std::abs(r.p - rounded) <= kBalancedTol && rounded >= 0) {
    r.result_class = PolyLog{static_cast<unsigned>(rounded), 0};
  } else {
    r.result_class = RealPower{r.p, "p ~ " + nearest_rational(r.p)};
  }
  return r;
}

/// f(n+1) = f(n) + g(n), or f(n+1, m) = f(n, m) + g(m) with f(0, m) <= C.
struct LinearRecSpec {
  unsigned arity = 1;
  PolyLog g;
  long long base_bound = 0;
};

inline LandauClass linear_rec_class(const LinearRecSpec& s) {
  if (s.arity == 1) return PolyLog{s.g.a + 1, s.g.b};
  if (s.arity == 2) {
    return Class2(PolyLog2{1, 0, s.g.a, s.g.b});
  }
  throw InvalidSpec("linear recurrences have arity 1 or 2");
}

}  // namespace timecredit
