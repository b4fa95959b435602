#include <gtest/gtest.h>

#include <random>

#include "timecredit/landau.hpp"

using namespace timecredit;

namespace {

BoundRegistry example_registry() {
  BoundRegistry r;
  r.declare("f1", PolyLog{1, 0});
  r.declare("f2", PolyLog{0, 1});
  r.declare("f3", Class2(PolyLog2{1, 0, 1, 0}));
  r.declare("f4", Class2({PolyLog2{1, 0, 0, 0}, PolyLog2{0, 0, 1, 0}}));
  return r;
}

Summand call1(std::string f, InnerArg a, std::vector<unsigned> mono = {}, unsigned long long c = 1) {
  return Summand{c, std::move(mono), Summand::Call{std::move(f), {a}}};
}

}  // namespace

TEST(Landau, SubsetSingle) {
  EXPECT_TRUE(o_subset({1, 0}, {1, 1}));
  EXPECT_FALSE(o_subset({2, 0}, {1, 5}));
  EXPECT_TRUE(o_subset({1, 5}, {2, 0}));
}

TEST(Landau, SubsetNumericNotBounded) {
  // n^2 / (n ln^5 n) keeps growing up to 2^40.
  PolyLog g1{2, 0}, g2{1, 5};
  long double prev = 0;
  for (unsigned k = 24; k <= 40; k += 4) {
    long double n = std::ldexp(1.0L, static_cast<int>(k));
    long double r = g1.log_value(n) - g2.log_value(n);
    EXPECT_GT(r, prev);
    prev = r;
  }
}

TEST(Landau, SubsetAgreesWithNumericDomination) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    PolyLog g1{static_cast<unsigned>(rng() % 4), static_cast<unsigned>(rng() % 4)};
    PolyLog g2{static_cast<unsigned>(rng() % 4), static_cast<unsigned>(rng() % 4)};
    auto lr = [&](unsigned k) {
      long double n = std::ldexp(1.0L, static_cast<int>(k));
      return g1.log_value(n) - g2.log_value(n);
    };
    if (o_subset(g1, g2) && o_subset(g2, g1)) {
      EXPECT_NEAR(static_cast<double>(lr(40)), 0.0, 1e-9);
    } else if (o_subset(g1, g2)) {
      // Bounded: the log ratio over [2^20, 2^40] never exceeds its value at 2^20.
      for (unsigned k = 20; k <= 40; k += 5) EXPECT_LE(lr(k), lr(20) + 1e-9L);
    } else {
      EXPECT_GT(lr(40), lr(30));
    }
  }
}

TEST(Landau, Subset2) {
  EXPECT_EQ(o_subset2({2, 0, 1, 0}, {1, 0, 2, 0}), Order2::Incomparable);
  EXPECT_EQ(o_subset2({1, 0, 0, 0}, {1, 0, 1, 0}), Order2::Subset);
  EXPECT_EQ(o_subset2({1, 0, 1, 0}, {1, 0, 0, 0}), Order2::Superset);
  EXPECT_EQ(o_subset2({1, 1, 1, 0}, {1, 1, 1, 0}), Order2::Equal);
}

TEST(Landau, SumTheta) {
  EXPECT_EQ(sum_theta({{1, 0}, {1, 1}, {0, 0}}), (PolyLog{1, 1}));
  EXPECT_EQ(sum_theta2(std::vector<PolyLog2>{{1, 0, 1, 0}, {1, 0, 0, 0}, {0, 0, 1, 0}}), Class2(PolyLog2{1, 0, 1, 0}));
  EXPECT_THROW(sum_theta2(std::vector<PolyLog2>{{2, 0, 1, 0}, {1, 0, 2, 0}}), IncomparableError);
  EXPECT_THROW(sum_theta(std::vector<PolyLog>{}), std::invalid_argument);
}

TEST(Landau, SumThetaGridWitness) {
  Fn2 f = [](std::uint64_t m, std::uint64_t n) { return static_cast<long double>(m) * n + m + n; };
  Class2 g = sum_theta2(std::vector<PolyLog2>{{1, 0, 1, 0}, {1, 0, 0, 0}, {0, 0, 1, 0}});
  WitnessReport r = calibrate_and_verify2(f, g, off_power_samples(4, 12), powers_of_two(4, 12));
  EXPECT_TRUE(r.pass) << r.detail;
}

TEST(Landau, ComposeLinear) {
  EXPECT_EQ(compose_linear({0, 1}, InnerArg::affine(0, 2)), (PolyLog{0, 1}));
  EXPECT_EQ(compose_linear({1, 0}, InnerArg::affine(0, 1, 1)), (PolyLog{1, 0}));
  EXPECT_EQ(compose_linear({1, 0}, InnerArg::floor_div(0, 3)), (PolyLog{1, 0}));
  EXPECT_THROW(compose_linear({1, 0}, InnerArg::exponential(0)), NonLinearArgument);
  EXPECT_THROW(compose_linear({1, 0}, InnerArg::affine(0, 0, 3)), NonLinearArgument);
}

TEST(Landau, AnalyzeSingleVariableExample) {
  // f1(n+1) + n*f2(2n) + 3n*f2(n div 3)
  AsymExpr e{1,
             {call1("f1", InnerArg::affine(0, 1, 1)), call1("f2", InnerArg::affine(0, 2), {1}),
              call1("f2", InnerArg::floor_div(0, 3), {1}, 3)}};
  LandauClass c = analyze_expr(e, example_registry());
  EXPECT_TRUE(same_class(c, PolyLog{1, 1})) << to_string(c);
}

TEST(Landau, AnalyzeTwoVariableExamples) {
  BoundRegistry reg = example_registry();
  // f1(n) + f2(m) + m*n + f3(m div 3, n+1)
  AsymExpr e1{2,
              {call1("f1", InnerArg::affine(1)), call1("f2", InnerArg::affine(0)), Summand{1, {1, 1}, std::nullopt},
               Summand{1, {}, Summand::Call{"f3", {InnerArg::floor_div(0, 3), InnerArg::affine(1, 1, 1)}}}}};
  EXPECT_TRUE(same_class(analyze_expr(e1, reg), Class2(PolyLog2{1, 0, 1, 0})));

  // 1 + f1(n) + f2(m) + f4(m+1, n+1)
  AsymExpr e2{2,
              {Summand{1, {}, std::nullopt}, call1("f1", InnerArg::affine(1)), call1("f2", InnerArg::affine(0)),
               Summand{1, {}, Summand::Call{"f4", {InnerArg::affine(0, 1, 1), InnerArg::affine(1, 1, 1)}}}}};
  LandauClass c2 = analyze_expr(e2, reg);
  EXPECT_TRUE(same_class(c2, Class2({PolyLog2{1, 0, 0, 0}, PolyLog2{0, 0, 1, 0}}))) << to_string(c2);
  EXPECT_EQ(to_string(c2), "m + n");

  AsymExpr e3{2, {Summand{1, {2, 1}, std::nullopt}, Summand{1, {1, 2}, std::nullopt}}};
  EXPECT_THROW(analyze_expr(e3, reg), IncomparableError);
}

TEST(Landau, AnalyzeErrors) {
  BoundRegistry reg = example_registry();
  EXPECT_THROW(analyze_expr(AsymExpr{1, {call1("nope", InnerArg::affine(0))}}, reg), UnknownBound);
  EXPECT_THROW(analyze_expr(AsymExpr{1, {call1("f1", InnerArg::exponential(0))}}, reg), NonLinearArgument);
}

TEST(Landau, AnalyzePermutationInvariant) {
  std::vector<Summand> ss{call1("f1", InnerArg::affine(0, 1, 1)), call1("f2", InnerArg::affine(0, 2), {1}),
                          Summand{5, {}, std::nullopt}, call1("f2", InnerArg::floor_div(0, 3), {2})};
  std::sort(ss.begin(), ss.end(), [](const Summand& a, const Summand& b) { return a.coeff < b.coeff; });
  LandauClass first = analyze_expr(AsymExpr{1, ss}, example_registry());
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(ss.begin(), ss.end(), rng);
    EXPECT_TRUE(same_class(analyze_expr(AsymExpr{1, ss}, example_registry()), first));
  }
}

TEST(Landau, RegistryRoundTrip) {
  BoundRegistry r = example_registry();
  r.declare("merge_sort_time", PolyLog{1, 1}, "solved-by-recurrence");
  std::string text = r.serialize();
  EXPECT_NE(text.find("f4,2,0,0,1,0,1,0,0,0,declared"), std::string::npos) << text;
  EXPECT_NE(text.find("merge_sort_time,1,1,1,solved-by-recurrence"), std::string::npos);
  BoundRegistry back = BoundRegistry::parse(text);
  EXPECT_EQ(back.serialize(), text);
  EXPECT_THROW(BoundRegistry::parse("x,3,1,1,declared\n"), std::invalid_argument);
  EXPECT_THROW(BoundRegistry::parse("x,1,a,1,declared\n"), std::invalid_argument);
}

TEST(Landau, WitnessFailsForWrongClass) {
  Fn1 sq = [](std::uint64_t n) { return static_cast<long double>(n) * n; };
  WitnessReport r = calibrate_and_verify(sq, PolyLog{1, 0}, off_power_samples(4, 12), powers_of_two(4, 20));
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.detail.empty());
  EXPECT_TRUE(calibrate_and_verify(sq, PolyLog{2, 0}, off_power_samples(4, 12), powers_of_two(4, 20)).pass);
}

TEST(Landau, ShapeFunctionIsLogarithmic) {
  Fn1 s = [](std::uint64_t n) { return std::ceil(3 * std::log2(static_cast<long double>(n))) + 2; };
  EXPECT_TRUE(calibrate_and_verify(s, PolyLog{0, 1}, off_power_samples(1, 12), powers_of_two(1, 30)).pass);
}
