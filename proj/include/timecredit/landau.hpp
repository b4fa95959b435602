#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace timecredit {

/// n^a (ln n)^b.
struct PolyLog {
  unsigned a = 0;
  unsigned b = 0;

  friend bool operator==(const PolyLog&, const PolyLog&) = default;
  friend auto operator<=>(const PolyLog&, const PolyLog&) = default;

  long double log_value(long double n) const {
    return a * std::log(n) + (b ? b * std::log(std::log(n)) : 0.0L);
  }
  long double value(long double n) const { return std::pow(n, a) * std::pow(std::log(n), b); }
};

inline std::string factor_str(const char* v, unsigned a, unsigned b) {
  std::string s;
  if (a == 1) s += v;
  if (a > 1) s += std::string(v) + "^" + std::to_string(a);
  if (b > 0) {
    if (!s.empty()) s += " ";
    s += std::string("ln") + (b > 1 ? "^" + std::to_string(b) : "") + " " + v;
  }
  return s;
}

inline std::string to_string(const PolyLog& g) {
  std::string s = factor_str("n", g.a, g.b);
  return s.empty() ? "1" : s;
}

/// m^a (ln m)^b n^c (ln n)^d under the product filter.
struct PolyLog2 {
  unsigned a = 0, b = 0, c = 0, d = 0;

  friend bool operator==(const PolyLog2&, const PolyLog2&) = default;
  friend auto operator<=>(const PolyLog2&, const PolyLog2&) = default;

  PolyLog first() const { return {a, b}; }
  PolyLog second() const { return {c, d}; }
  long double value(long double m, long double n) const { return first().value(m) * second().value(n); }
};

inline std::string to_string(const PolyLog2& g) {
  std::string l = factor_str("m", g.a, g.b), r = factor_str("n", g.c, g.d);
  if (l.empty() && r.empty()) return "1";
  if (l.empty()) return r;
  if (r.empty()) return l;
  return l + " " + r;
}

/// n^p (ln n)^b for a real p (bottom-heavy solutions, neighbouring classes).
/// Display and numeric checks only.
struct RealPower {
  long double p = 0;
  std::string annotation;
  unsigned b = 0;

  long double value(long double n) const { return std::pow(n, p) * std::pow(std::log(n), b); }
};

inline std::string to_string(const RealPower& g) {
  std::ostringstream os;
  os.precision(8);
  os << "n^" << static_cast<double>(g.p);
  if (g.b) os << " ln" << (g.b > 1 ? "^" + std::to_string(g.b) : "") << " n";
  if (!g.annotation.empty()) os << " (" << g.annotation << ")";
  return os.str();
}

inline bool o_subset(const PolyLog& g1, const PolyLog& g2) { return g1 <= g2; }

enum class Order2 { Subset, Superset, Equal, Incomparable };

inline Order2 o_subset2(const PolyLog2& g1, const PolyLog2& g2) {
  auto c1 = g1.first() <=> g2.first();
  auto c2 = g1.second() <=> g2.second();
  if (c1 == 0 && c2 == 0) return Order2::Equal;
  if (c1 <= 0 && c2 <= 0) return Order2::Subset;
  if (c1 >= 0 && c2 >= 0) return Order2::Superset;
  return Order2::Incomparable;
}

inline bool dominated2(const PolyLog2& t, const PolyLog2& u) {
  Order2 o = o_subset2(t, u);
  return o == Order2::Subset || o == Order2::Equal;
}

/// Sum of pairwise incomparable two-variable monomials, e.g. m + n.
struct Class2 {
  std::vector<PolyLog2> members;

  Class2() = default;
  Class2(PolyLog2 g) : members{g} {}
  explicit Class2(std::vector<PolyLog2> gs) : members(std::move(gs)) { reduce(); }

  /// Drops members dominated by other members and sorts.
  void reduce() {
    std::vector<PolyLog2> keep;
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (const auto& g : members) {
      bool dom = false;
      for (const auto& h : members) dom |= (g != h && dominated2(g, h));
      if (!dom) keep.push_back(g);
    }
    members = std::move(keep);
  }

  /// Every member of *this is dominated by some member of o.
  bool subset_of(const Class2& o) const {
    for (const auto& g : members) {
      if (std::none_of(o.members.begin(), o.members.end(), [&](const PolyLog2& h) { return dominated2(g, h); })) {
        return false;
      }
    }
    return true;
  }

  long double value(long double m, long double n) const {
    long double s = 0;
    for (const auto& g : members) s += g.value(m, n);
    return s;
  }

  friend bool operator==(const Class2& x, const Class2& y) { return x.members == y.members; }
};

inline std::string to_string(const Class2& g) {
  if (g.members.empty()) return "0";
  std::string s;
  for (auto it = g.members.rbegin(); it != g.members.rend(); ++it) s += (s.empty() ? "" : " + ") + to_string(*it);
  return s;
}

using LandauClass = std::variant<PolyLog, Class2, RealPower>;

inline std::string to_string(const LandauClass& c) {
  return std::visit([](const auto& x) { return to_string(x); }, c);
}
inline std::string theta_str(const LandauClass& c) {
  return (std::holds_alternative<Class2>(c) ? "Theta2(" : "Theta(") + to_string(c) + ")";
}

inline bool same_class(const LandauClass& x, const LandauClass& y) {
  if (x.index() != y.index()) return false;
  if (auto* a = std::get_if<PolyLog>(&x)) return *a == std::get<PolyLog>(y);
  if (auto* a = std::get_if<Class2>(&x)) return *a == std::get<Class2>(y);
  const auto &a = std::get<RealPower>(x), &b = std::get<RealPower>(y);
  return a.b == b.b && std::abs(a.p - b.p) <= 1e-6L;
}

class IncomparableError : public std::runtime_error {
 public:
  IncomparableError(std::string l, std::string r)
      : std::runtime_error("incomparable classes: " + l + " vs " + r), left(std::move(l)), right(std::move(r)) {}
  std::string left, right;
};

inline PolyLog sum_theta(const std::vector<PolyLog>& gs) {
  if (gs.empty()) throw std::invalid_argument("sum_theta of empty list");
  return *std::max_element(gs.begin(), gs.end());
}

/// Absorption for two variables: the sum is Theta of the summand that
/// dominates every other summand. No such summand means incomparable.
inline Class2 sum_theta2(const std::vector<Class2>& gs) {
  if (gs.empty()) throw std::invalid_argument("sum_theta2 of empty list");
  for (const auto& cand : gs) {
    if (std::all_of(gs.begin(), gs.end(), [&](const Class2& o) { return o.subset_of(cand); })) return cand;
  }
  for (std::size_t i = 0; i < gs.size(); ++i) {
    for (std::size_t j = 0; j < gs.size(); ++j) {
      if (!gs[i].subset_of(gs[j]) && !gs[j].subset_of(gs[i])) {
        throw IncomparableError(to_string(gs[i]), to_string(gs[j]));
      }
    }
  }
  throw IncomparableError(to_string(gs.front()), to_string(gs.back()));
}

inline Class2 sum_theta2(const std::vector<PolyLog2>& gs) {
  std::vector<Class2> cs(gs.begin(), gs.end());
  return sum_theta2(cs);
}

/// Inner argument of a call, as a function of one outer variable.
struct InnerArg {
  enum class Kind { Affine, FloorDiv, CeilDiv, Exponential };
  Kind kind = Kind::Affine;
  unsigned var = 0;         // index of the outer variable
  long double alpha = 1;    // Affine: alpha * x + beta
  long double beta = 0;
  unsigned k = 1;           // FloorDiv / CeilDiv divisor

  static InnerArg affine(unsigned var, long double alpha = 1, long double beta = 0) {
    return {Kind::Affine, var, alpha, beta, 1};
  }
  static InnerArg floor_div(unsigned var, unsigned k) { return {Kind::FloorDiv, var, 1, 0, k}; }
  static InnerArg ceil_div(unsigned var, unsigned k) { return {Kind::CeilDiv, var, 1, 0, k}; }
  static InnerArg exponential(unsigned var) { return {Kind::Exponential, var, 1, 0, 1}; }

  std::string str() const {
    std::string v = var == 0 ? "x0" : "x" + std::to_string(var);
    std::ostringstream os;
    switch (kind) {
      case Kind::Affine: os << static_cast<double>(alpha) << "*" << v << "+" << static_cast<double>(beta); break;
      case Kind::FloorDiv: os << v << " div " << k; break;
      case Kind::CeilDiv: os << "ceil(" << v << "/" << k << ")"; break;
      case Kind::Exponential: os << "2^" << v; break;
    }
    return os.str();
  }
};

class NonLinearArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void check_linear(const InnerArg& in) {
  bool ok = false;
  switch (in.kind) {
    case InnerArg::Kind::Affine: ok = in.alpha > 0; break;
    case InnerArg::Kind::FloorDiv:
    case InnerArg::Kind::CeilDiv: ok = in.k >= 1; break;
    case InnerArg::Kind::Exponential: ok = false; break;
  }
  if (!ok) throw NonLinearArgument("inner argument is not Theta(n): " + in.str());
}

/// u in Theta(g) and v in Theta(n) give u o v in Theta(g).
inline PolyLog compose_linear(const PolyLog& g, const InnerArg& inner) {
  check_linear(inner);
  return g;
}

/// Registry entry for a runtime function.
struct BoundEntry {
  unsigned arity = 1;
  LandauClass cls;
  std::string provenance = "declared";
};

class BoundRegistry {
 public:
  void declare(const std::string& name, PolyLog g, std::string prov = "declared") {
    entries_[name] = {1, g, std::move(prov)};
  }
  void declare(const std::string& name, Class2 g, std::string prov = "declared") {
    entries_[name] = {2, std::move(g), std::move(prov)};
  }

  const BoundEntry& lookup(const std::string& name) const;
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  const std::map<std::string, BoundEntry>& entries() const { return entries_; }

  /// One record per line: name,arity,exponents...,provenance.
  std::string serialize() const {
    std::ostringstream os;
    for (const auto& [name, e] : entries_) {
      os << name << ',' << e.arity;
      if (auto* g = std::get_if<PolyLog>(&e.cls)) {
        os << ',' << g->a << ',' << g->b;
      } else if (auto* c = std::get_if<Class2>(&e.cls)) {
        for (const auto& m : c->members) os << ',' << m.a << ',' << m.b << ',' << m.c << ',' << m.d;
      }
      os << ',' << e.provenance << '\n';
    }
    return os.str();
  }

  static BoundRegistry parse(const std::string& text) {
    BoundRegistry r;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> f;
      std::stringstream ls(line);
      std::string tok;
      while (std::getline(ls, tok, ',')) f.push_back(tok);
      auto bad = [&](const std::string& why) {
        return std::invalid_argument("registry line " + std::to_string(lineno) + ": " + why);
      };
      if (f.size() < 4) throw bad("too few fields");
      std::vector<unsigned> ex;
      try {
        for (std::size_t i = 2; i + 1 < f.size(); ++i) ex.push_back(static_cast<unsigned>(std::stoul(f[i])));
      } catch (const std::exception&) {
        throw bad("exponent is not a natural");
      }
      const std::string& arity = f[1];
      if (arity == "1") {
        if (ex.size() != 2) throw bad("arity 1 needs two exponents");
        r.declare(f[0], PolyLog{ex[0], ex[1]}, f.back());
      } else if (arity == "2") {
        if (ex.empty() || ex.size() % 4) throw bad("arity 2 needs groups of four exponents");
        std::vector<PolyLog2> ms;
        for (std::size_t i = 0; i < ex.size(); i += 4) ms.push_back({ex[i], ex[i + 1], ex[i + 2], ex[i + 3]});
        r.declare(f[0], Class2(ms), f.back());
      } else {
        throw bad("arity must be 1 or 2");
      }
    }
    return r;
  }

  void save(const std::string& path) const {
    std::ofstream os(path);
    os << serialize();
  }
  static BoundRegistry load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse(ss.str());
  }

 private:
  std::map<std::string, BoundEntry> entries_;
};

class UnknownBound : public std::runtime_error {
 public:
  explicit UnknownBound(const std::string& f) : std::runtime_error("no registered bound for " + f), name(f) {}
  std::string name;
};

inline const BoundEntry& BoundRegistry::lookup(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw UnknownBound(name);
  return it->second;
}

/// coeff * x0^e0 * x1^e1 * f(args), the call being optional.
struct Summand {
  unsigned long long coeff = 1;
  std::vector<unsigned> monomial;
  struct Call {
    std::string fname;
    std::vector<InnerArg> args;
  };
  std::optional<Call> call;
};

struct AsymExpr {
  unsigned arity = 1;
  std::vector<Summand> summands;
};

namespace detail {

inline unsigned mono(const Summand& s, unsigned i) { return i < s.monomial.size() ? s.monomial[i] : 0; }

inline PolyLog summand_class1(const Summand& s, const BoundRegistry& reg) {
  PolyLog g{mono(s, 0), 0};
  if (!s.call) return g;
  const BoundEntry& e = reg.lookup(s.call->fname);
  if (e.arity != 1 || s.call->args.size() != 1) throw std::invalid_argument("arity mismatch for " + s.call->fname);
  auto* f = std::get_if<PolyLog>(&e.cls);
  if (!f) throw std::invalid_argument("registry class of " + s.call->fname + " is not a polylog");
  PolyLog c = compose_linear(*f, s.call->args[0]);
  return {g.a + c.a, c.b};
}

inline Class2 summand_class2(const Summand& s, const BoundRegistry& reg) {
  PolyLog2 base{mono(s, 0), 0, mono(s, 1), 0};
  if (!s.call) return Class2(base);
  const BoundEntry& e = reg.lookup(s.call->fname);
  const auto& args = s.call->args;
  if (args.size() != e.arity) throw std::invalid_argument("arity mismatch for " + s.call->fname);
  for (const auto& a : args) check_linear(a);
  std::vector<PolyLog2> out;
  if (e.arity == 1) {
    PolyLog f = std::get<PolyLog>(e.cls);
    PolyLog2 g = args[0].var == 0 ? PolyLog2{f.a, f.b, 0, 0} : PolyLog2{0, 0, f.a, f.b};
    out.push_back(g);
  } else {
    if (args[0].var == args[1].var) throw NonLinearArgument("both arguments use the same variable");
    bool swapped = args[0].var == 1;
    for (PolyLog2 g : std::get<Class2>(e.cls).members) {
      if (swapped) g = {g.c, g.d, g.a, g.b};
      out.push_back(g);
    }
  }
  for (auto& g : out) {
    g.a += base.a;
    g.c += base.c;
  }
  return Class2(out);
}

}  // namespace detail

/// Theta class of a sum of terms from the classes of its parts.
inline LandauClass analyze_expr(const AsymExpr& e, const BoundRegistry& reg) {
  std::vector<const Summand*> live;
  for (const auto& s : e.summands) {
    if (s.coeff != 0) live.push_back(&s);
  }
  if (live.empty()) throw std::invalid_argument("expression has no nonzero summand");
  if (e.arity == 1) {
    std::vector<PolyLog> cs;
    for (const Summand* s : live) cs.push_back(detail::summand_class1(*s, reg));
    return sum_theta(cs);
  }
  if (e.arity != 2) throw std::invalid_argument("arity must be 1 or 2");
  std::vector<Class2> cs;
  for (const Summand* s : live) cs.push_back(detail::summand_class2(*s, reg));
  return sum_theta2(cs);
}

/// Certificate c_lower * g <= f <= c_upper * g for sampled points >= N.
struct ThetaWitness {
  long double c_lower = 0;
  long double c_upper = 0;
  std::uint64_t N = 2;
};

struct WitnessReport {
  bool pass = true;
  std::string detail;
  long double min_ratio = 0;
  long double max_ratio = 0;
};

using Fn1 = std::function<long double(std::uint64_t)>;
using Fn2 = std::function<long double(std::uint64_t, std::uint64_t)>;

/// The class with its power exponent shifted by delta (logs kept).
inline RealPower shifted(const LandauClass& g, long double delta) {
  if (auto* p = std::get_if<PolyLog>(&g)) return RealPower{p->a + delta, "", p->b};
  if (auto* r = std::get_if<RealPower>(&g)) return RealPower{r->p + delta, "", r->b};
  throw std::invalid_argument("cannot shift a two-variable class");
}

inline long double class_value(const LandauClass& g, long double n) {
  if (auto* p = std::get_if<PolyLog>(&g)) return p->value(n);
  if (auto* r = std::get_if<RealPower>(&g)) return r->value(n);
  throw std::invalid_argument("two-variable class used with one argument");
}

namespace detail {

inline WitnessReport check_ratios(const std::vector<std::pair<std::string, long double>>& rs, const ThetaWitness& w) {
  WitnessReport rep;
  bool first = true;
  for (const auto& [where, r] : rs) {
    if (first) {
      rep.min_ratio = rep.max_ratio = r;
      first = false;
    }
    rep.min_ratio = std::min(rep.min_ratio, r);
    rep.max_ratio = std::max(rep.max_ratio, r);
    if (rep.pass && (!(r >= w.c_lower) || !(r <= w.c_upper))) {
      rep.pass = false;
      std::ostringstream os;
      os << "ratio " << static_cast<double>(r) << " at " << where << " outside [" << static_cast<double>(w.c_lower)
         << ", " << static_cast<double>(w.c_upper) << "]";
      rep.detail = os.str();
    }
  }
  return rep;
}

}  // namespace detail

inline WitnessReport check_theta_witness(const Fn1& f, const LandauClass& g, const ThetaWitness& w,
                                         const std::vector<std::uint64_t>& samples) {
  std::vector<std::pair<std::string, long double>> rs;
  for (auto n : samples) {
    if (n < w.N || n < 2) continue;
    rs.emplace_back("n=" + std::to_string(n), f(n) / class_value(g, static_cast<long double>(n)));
  }
  if (rs.empty()) return {false, "no samples at or above N", 0, 0};
  return detail::check_ratios(rs, w);
}

inline WitnessReport check_theta_witness2(const Fn2& f, const Class2& g, const ThetaWitness& w,
                                          const std::vector<std::uint64_t>& axis) {
  std::vector<std::pair<std::string, long double>> rs;
  for (auto m : axis) {
    for (auto n : axis) {
      if (m < w.N || n < w.N || m < 2 || n < 2) continue;
      rs.emplace_back("(m,n)=(" + std::to_string(m) + "," + std::to_string(n) + ")",
                      f(m, n) / g.value(static_cast<long double>(m), static_cast<long double>(n)));
    }
  }
  if (rs.empty()) return {false, "no samples at or above N", 0, 0};
  return detail::check_ratios(rs, w);
}

inline std::vector<std::uint64_t> powers_of_two(unsigned lo, unsigned hi) {
  std::vector<std::uint64_t> out;
  for (unsigned k = lo; k <= hi; ++k) out.push_back(std::uint64_t{1} << k);
  return out;
}

/// Geometric samples strictly between powers of two, disjoint from them.
inline std::vector<std::uint64_t> off_power_samples(unsigned lo, unsigned hi) {
  std::vector<std::uint64_t> out;
  for (unsigned k = lo; k < hi; ++k) out.push_back((std::uint64_t{3} << k) / 2 + 1);
  return out;
}

constexpr long double kWitnessMargin = 2.0L;

/// Constants from the observed ratio range on the training samples, widened
/// by the margin factor.
inline ThetaWitness calibrate(const Fn1& f, const LandauClass& g, const std::vector<std::uint64_t>& train) {
  ThetaWitness w{0, 0, std::max<std::uint64_t>(2, *std::min_element(train.begin(), train.end()))};
  WitnessReport r = check_theta_witness(f, g, {0, 1e300L, w.N}, train);
  w.c_lower = r.min_ratio / kWitnessMargin;
  w.c_upper = r.max_ratio * kWitnessMargin;
  return w;
}

inline ThetaWitness calibrate2(const Fn2& f, const Class2& g, const std::vector<std::uint64_t>& axis) {
  ThetaWitness w{0, 0, std::max<std::uint64_t>(2, *std::min_element(axis.begin(), axis.end()))};
  WitnessReport r = check_theta_witness2(f, g, {0, 1e300L, w.N}, axis);
  w.c_lower = r.min_ratio / kWitnessMargin;
  w.c_upper = r.max_ratio * kWitnessMargin;
  return w;
}

/// Calibrate on `train`, then require the witness to hold on `verify`.
inline WitnessReport calibrate_and_verify(const Fn1& f, const LandauClass& g, const std::vector<std::uint64_t>& train,
                                          const std::vector<std::uint64_t>& verify, ThetaWitness* out = nullptr) {
  ThetaWitness w = calibrate(f, g, train);
  if (out) *out = w;
  return check_theta_witness(f, g, w, verify);
}

inline WitnessReport calibrate_and_verify2(const Fn2& f, const Class2& g, const std::vector<std::uint64_t>& train,
                                           const std::vector<std::uint64_t>& verify, ThetaWitness* out = nullptr) {
  ThetaWitness w = calibrate2(f, g, train);
  if (out) *out = w;
  return check_theta_witness2(f, g, w, verify);
}

}  // namespace timecredit
