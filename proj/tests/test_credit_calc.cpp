#include <gtest/gtest.h>

#include <random>

#include "timecredit/credit_calc.hpp"

using namespace timecredit;

namespace {

const Term n = var("n");

TimeExpr merge_sort_body() {
  return TimeExpr(2) + call("atake_time", n) + call("adrop_time", n) +
         call("merge_sort_time", tdiv(n, nat(2))) + call("merge_sort_time", n - tdiv(n, nat(2))) +
         call("mergeinto_time", n);
}

/// Deterministic pseudo-random meaning for any named function.
Int hashed_call(std::uint64_t salt, const std::string& f, const std::vector<Int>& xs) {
  std::uint64_t h = salt ^ std::hash<std::string>{}(f);
  for (const Int& x : xs) h = h * 1000003u ^ x.convert_to<std::uint64_t>();
  return Int(h % 997);
}

Env random_env(std::mt19937_64& rng) {
  Env env;
  for (const char* v : {"n", "m", "k"}) env.vars[v] = Int(rng() % 5000);
  std::uint64_t salt = rng();
  env.call = [salt](const std::string& f, const std::vector<Int>& xs) { return hashed_call(salt, f, xs); };
  return env;
}

TimeExpr random_expr(std::mt19937_64& rng, int depth) {
  static const std::vector<Term> atoms = {var("n"), var("m"), app("f", {var("n")}),
                                          app("g", {tdiv(var("n"), nat(2))}), app("f", {var("m") + nat(1)})};
  switch (depth <= 0 ? rng() % 2 : rng() % 4) {
    case 0: return TimeExpr(Int(rng() % 6));
    case 1: return TimeExpr(atoms[rng() % atoms.size()]);
    case 2: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    default: return TimeExpr(Int(rng() % 4)) * random_expr(rng, depth - 1);
  }
}

}  // namespace

TEST(Normalize, MergeSortBody) {
  PolyForm p = normalize(merge_sort_body());
  EXPECT_EQ(p.terms().size(), 6u);
  EXPECT_EQ(p.constant_part(), 2);
  EXPECT_EQ(p.coeff(app("atake_time", {n})), 1);
  EXPECT_EQ(p.str(),
            "2 + 1*adrop_time(n) + 1*atake_time(n) + 1*merge_sort_time((n - (n div 2))) + "
            "1*merge_sort_time((n div 2)) + 1*mergeinto_time(n)");
}

TEST(Normalize, LikeTerms) {
  PolyForm p = normalize(TimeExpr(3) * TimeExpr(n) + TimeExpr(n) + 1);
  EXPECT_EQ(p.coeff(n), 4);
  EXPECT_EQ(p.constant_part(), 1);
  EXPECT_EQ(p.str(), "1 + 4*n");
}

TEST(Normalize, RejectsSubAndNonLinear) {
  EXPECT_THROW(normalize(minus(TimeExpr(n), 1)), NormalizeError);
  EXPECT_THROW(normalize(TimeExpr(n) * TimeExpr(n)), NormalizeError);
}

TEST(Normalize, IdempotentAndEvalPreserving) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    TimeExpr e = random_expr(rng, 4);
    PolyForm p = normalize(e);
    EXPECT_EQ(normalize(p.to_expr()), p);
    Env env = random_env(rng);
    EXPECT_EQ(eval(p, env), eval_expr(e, env));
  }
}

TEST(Match, MergeSortPrefix) {
  PolyForm T = normalize(merge_sort_body());
  PolyForm Tp = normalize(TimeExpr(1) + call("atake_time", n));
  MatchResult r = subtract_match(T, Tp);
  ASSERT_TRUE(std::holds_alternative<PolyForm>(r));
  PolyForm rem = std::get<PolyForm>(r);
  EXPECT_EQ(rem.constant_part(), 1);
  EXPECT_EQ(rem.coeff(app("atake_time", {n})), 0);
  EXPECT_EQ(rem.coeff(app("adrop_time", {n})), 1);
  EXPECT_EQ(rem.terms().size(), 5u);
}

TEST(Match, CoefficientTooSmall) {
  MatchResult r = subtract_match(PolyForm::of(n, 3), PolyForm::of(n, 4));
  ASSERT_TRUE(std::holds_alternative<MatchFailure>(r));
  EXPECT_EQ(std::get<MatchFailure>(r).term, n);
  EXPECT_EQ(std::get<MatchFailure>(r).coeff, 4);
  EXPECT_FALSE(std::get<MatchFailure>(r).candidates.empty());
}

TEST(Match, ModuloEquations) {
  Term m = var("m");
  PolyForm T = PolyForm::of(app("merge_sort_time", {tdiv(n, nat(2))}));
  PolyForm Tp = PolyForm::of(app("merge_sort_time", {m}));
  EXPECT_TRUE(std::holds_alternative<MatchFailure>(subtract_match(T, Tp)));
  MatchResult r = subtract_match(T, Tp, {{m, tdiv(n, nat(2))}});
  ASSERT_TRUE(std::holds_alternative<PolyForm>(r));
  EXPECT_TRUE(std::get<PolyForm>(r).empty());
}

TEST(Match, CongruenceIsTransitiveAndNested) {
  Term a = var("a"), b = var("b"), c = var("c");
  CongruenceClosure cc({{a, b}, {b, c}});
  EXPECT_TRUE(cc.equal(app("f", {app("g", {a})}), app("f", {app("g", {c})})));
  EXPECT_FALSE(cc.equal(app("f", {a}), app("h", {a})));
}

TEST(Match, SoundOnRandomInstances) {
  std::mt19937_64 rng(9);
  int successes = 0;
  for (int i = 0; i < 1000; ++i) {
    PolyForm T = normalize(random_expr(rng, 5));
    PolyForm Tp;
    for (const auto& [t, c] : T.terms()) {
      if (rng() % 2) Tp.add(t, Int(rng() % (c.convert_to<std::uint64_t>() + 2)));
    }
    MatchResult r = subtract_match(T, Tp);
    if (auto* rem = std::get_if<PolyForm>(&r)) {
      ++successes;
      Env env = random_env(rng);
      EXPECT_EQ(eval(T, env), eval(Tp, env) + eval(*rem, env));
      PolyForm back = Tp;
      back.add(*rem);
      EXPECT_EQ(back, T);
    }
  }
  EXPECT_GT(successes, 300);
}

TEST(Hint, ReplacesAtom) {
  auto sel = [](std::uint64_t k) { return app("select_time", {nat(k)}); };
  PolyForm T = normalize(TimeExpr(5) + TimeExpr(sel(14)));
  Hint h{PolyForm::of(sel(14)), PolyForm::of(sel(13)), [] { return true; }, "mono"};
  HintResult r = apply_hint(T, h);
  EXPECT_TRUE(r.top_absorbing);
  EXPECT_EQ(r.form.coeff(sel(13)), 1);
  EXPECT_EQ(r.form.coeff(sel(14)), 0);
  EXPECT_EQ(r.form.constant_part(), 5);
}

TEST(Hint, AbsentAndUnprovable) {
  PolyForm T = PolyForm::of(n);
  Hint absent{PolyForm::of(var("z")), PolyForm::of(n), [] { return true; }, "x"};
  EXPECT_THROW(apply_hint(T, absent), HintAbsent);
  Hint wrong{PolyForm::of(n), PolyForm::of(var("z")), [] { return false; }, "y"};
  EXPECT_THROW(apply_hint(T, wrong), HintUnprovable);
}

TEST(Hint, ReflexiveKeepsForm) {
  PolyForm T = normalize(TimeExpr(2) + TimeExpr(n));
  Hint h{PolyForm::of(n), PolyForm::of(n), [] { return true; }, "refl"};
  HintResult r = apply_hint(T, h);
  EXPECT_EQ(r.form, T);
  EXPECT_TRUE(r.top_absorbing);
}

TEST(Hint, ResultNeverExceedsInput) {
  std::mt19937_64 rng(17);
  Term big = app("f", {var("n")}), small = app("f", {tdiv(var("n"), nat(2))});
  for (int i = 0; i < 200; ++i) {
    Env env;
    env.vars["n"] = Int(rng() % 1000);
    env.call = [](const std::string&, const std::vector<Int>& xs) { return xs[0] * 3; };
    PolyForm T = normalize(TimeExpr(Int(rng() % 9)) + TimeExpr(big));
    Hint h{PolyForm::of(big), PolyForm::of(small),
           [&] { return eval_term(big, env) >= eval_term(small, env); }, "half"};
    HintResult r = apply_hint(T, h);
    EXPECT_LE(eval(r.form, env), eval(T, env));
  }
}
