#include <gtest/gtest.h>

#include <random>

#include "support/triple_catalog.hpp"
#include "timecredit/seplogic.hpp"

using namespace timecredit;

namespace {

PartialHeap with_credits(std::uint64_t n) {
  PartialHeap ph;
  ph.credits = n;
  return ph;
}

}  // namespace

TEST(Sat, EmpNeedsZeroCredits) {
  EXPECT_TRUE(sat(with_credits(0), emp()));
  EXPECT_FALSE(sat(with_credits(1), emp()));
}

TEST(Sat, BasicAssertionsRejectCredits) {
  PartialHeap ph;
  Addr a = ph.heap.alloc_array(to_values({1, 2, 3}));
  ph.owned = {a.id};
  EXPECT_TRUE(sat(ph, points_to_array(a, to_values({1, 2, 3}))));
  ph.credits = 1;
  EXPECT_FALSE(sat(ph, points_to_array(a, to_values({1, 2, 3}))));
  EXPECT_FALSE(sat(with_credits(1), pure(true)));
  EXPECT_TRUE(sat(with_credits(0), pure(true)));
  EXPECT_FALSE(sat(with_credits(0), pure(false)));
}

TEST(Sat, ExactCreditDemand) {
  PartialHeap ph;
  Addr a = ph.heap.alloc_array(to_values({1, 2, 3}));
  ph.owned = {a.id};
  ph.credits = 5;
  EXPECT_TRUE(sat(ph, points_to_array(a, to_values({1, 2, 3})) * credits(5)));
  EXPECT_FALSE(sat(ph, points_to_array(a, to_values({1, 2, 3})) * credits(4)));
}

TEST(Sat, CreditsSplitAdditively) {
  for (std::uint64_t n = 0; n <= 20; ++n) {
    for (std::uint64_t m = 0; m <= 20; ++m) {
      EXPECT_TRUE(sat(with_credits(n + m), credits(n) * credits(m)));
      EXPECT_FALSE(sat(with_credits(n + m + 1), credits(n) * credits(m)));
      if (n + m > 0) {
        EXPECT_FALSE(sat(with_credits(n + m - 1), credits(n) * credits(m)));
      }
    }
  }
}

TEST(Sat, TopAbsorbsSurplus) {
  PartialHeap ph;
  Addr a = ph.heap.alloc_ref(3);
  Addr b = ph.heap.alloc_ref(4);
  ph.owned = {a.id, b.id};
  ph.credits = 9;
  EXPECT_TRUE(sat(ph, points_to(a, 3) * top()));
  EXPECT_FALSE(sat(ph, points_to(a, 3)));
  EXPECT_TRUE(sat(ph, top() * credits(2)));
  EXPECT_FALSE(sat(ph, top() * credits(10)));
}

TEST(Sat, ExistsFindsStoredSequence) {
  PartialHeap ph;
  Addr a = ph.heap.alloc_array(to_values({4, 9}));
  ph.owned = {a.id};
  auto p = exists([a](const Value& xs) {
    return points_to_array(a, xs.is_list() ? xs.as_list() : ValueList{}) *
           pure(xs.is_list() && xs.as_list().size() == 2);
  });
  EXPECT_TRUE(sat(ph, p));
  auto q = exists([](const Value& k) { return credits(k.is_int() && k.as_int() >= 0 ? k.as_index() : 0) * pure(k == Value(3)); });
  EXPECT_TRUE(sat(with_credits(3), q));
  EXPECT_FALSE(sat(with_credits(4), q));
}

TEST(Sat, ExistsOverflowIsReported) {
  PartialHeap ph;
  ValueList xs;
  for (int i = 0; i < 100; ++i) xs.emplace_back(i * 100);
  Addr a = ph.heap.alloc_array(xs);
  ph.owned = {a.id};
  SatConfig cfg;
  cfg.max_candidates = 50;
  auto p = exists([](const Value&) { return top(); });
  EXPECT_THROW(sat(ph, p, cfg), Undecidable);
}

TEST(Sat, UnownedAddressesDoNotSatisfy) {
  PartialHeap ph;
  Addr a = ph.heap.alloc_ref(1);
  EXPECT_FALSE(sat(ph, points_to(a, 1)));
}

namespace {

/// All partial heaps over two refs and one array with small credit counts.
std::vector<PartialHeap> small_models() {
  std::vector<PartialHeap> out;
  for (unsigned mask = 0; mask < 8; ++mask) {
    for (std::uint64_t c = 0; c <= 3; ++c) {
      PartialHeap ph;
      Addr r0 = ph.heap.alloc_ref(1);
      Addr r1 = ph.heap.alloc_ref(2);
      Addr a = ph.heap.alloc_array(to_values({5}));
      if (mask & 1) ph.owned.insert(r0.id);
      if (mask & 2) ph.owned.insert(r1.id);
      if (mask & 4) ph.owned.insert(a.id);
      ph.credits = c;
      out.push_back(ph);
    }
  }
  return out;
}

std::vector<Assertion> small_assertions() {
  Addr r0{0, AddrKind::Ref}, r1{1, AddrKind::Ref}, a{2, AddrKind::Array};
  return {emp(),
          credits(1),
          credits(2),
          top(),
          points_to(r0, 1),
          points_to(r1, 2),
          points_to(r1, 3),
          points_to_array(a, to_values({5})),
          pure(true),
          points_to(r0, 1) * credits(1),
          exists([r1](const Value& v) { return points_to(r1, v); })};
}

}  // namespace

TEST(Sat, SepConjCommutativeAndAssociative) {
  auto models = small_models();
  auto as = small_assertions();
  for (const auto& ph : models) {
    for (const auto& p : as) {
      for (const auto& q : as) {
        EXPECT_EQ(sat(ph, p * q), sat(ph, q * p)) << p.str() << " / " << q.str();
        for (const auto& r : {as[1], as[3], as[5], as[7]}) {
          EXPECT_EQ(sat(ph, (p * q) * r), sat(ph, p * (q * r)));
        }
      }
    }
  }
}

TEST(Sat, LocalityOutsideOwned) {
  std::mt19937_64 rng(5);
  auto as = small_assertions();
  for (const auto& ph : small_models()) {
    for (const auto& p : as) {
      PartialHeap mutated = ph;
      for (auto [id, v] : ph.heap.refs()) {
        if (!ph.owned.count(id)) mutated.heap.ref(Addr{id, AddrKind::Ref}) = Value(static_cast<long long>(rng() % 50));
      }
      for (auto [id, xs] : ph.heap.arrays()) {
        if (!ph.owned.count(id)) mutated.heap.array(Addr{id, AddrKind::Array}).push_back(Value(7));
      }
      EXPECT_EQ(sat(ph, p), sat(mutated, p));
    }
  }
}

TEST(Triple, ArrayNewPasses) {
  HoareTriple t{credits(5), array_new(4, 0),
                [](const Value& r) { return points_to_array(r.as_addr(), to_values({0, 0, 0, 0})); }, false};
  TripleVerdict v = check_triple(t, with_credits(5));
  EXPECT_TRUE(v.passed());
  EXPECT_FALSE(v.vacuous);

  HoareTriple t4 = t;
  t4.pre = credits(4);
  TripleVerdict f = check_triple(t4, with_credits(4));
  EXPECT_EQ(f.kind, TripleVerdict::Kind::FailCredits);
  EXPECT_EQ(f.needed, 5u);
  EXPECT_EQ(f.available, 4u);
}

TEST(Triple, ArrayLen) {
  PartialHeap ph;
  ValueList xs = to_values({1, 2, 3});
  Addr p = ph.heap.alloc_array(xs);
  ph.owned = {p.id};
  ph.credits = 1;
  HoareTriple t{points_to_array(p, xs) * credits(1), array_len(p),
                [=](const Value& r) { return points_to_array(p, xs) * pure(r == Value(3)); }, false};
  EXPECT_TRUE(check_triple(t, ph).passed());
}

TEST(Triple, ExecutionFailureAndPostFailure) {
  HoareTriple bad{credits(1), ref_read(Addr{7, AddrKind::Ref}), [](const Value&) { return emp(); }, false};
  EXPECT_EQ(check_triple(bad, with_credits(1)).kind, TripleVerdict::Kind::FailExecution);

  HoareTriple wrong{credits(1), return_pure(3), [](const Value& r) { return pure(r == Value(4)); }, false};
  TripleVerdict v = check_triple(wrong, with_credits(1));
  EXPECT_EQ(v.kind, TripleVerdict::Kind::FailPost);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(v.witness->credits, 0u);
}

TEST(Triple, SurplusNeedsTopAbsorbingPost) {
  HoareTriple t{credits(3), return_pure(0), [](const Value&) { return emp(); }, false};
  EXPECT_EQ(check_triple(t, with_credits(3)).kind, TripleVerdict::Kind::FailPost);
  t.top_absorbing = true;
  EXPECT_TRUE(check_triple(t, with_credits(3)).passed());
}

TEST(Triple, VacuousWhenPreFails) {
  HoareTriple t{pure(false), return_pure(0), [](const Value&) { return emp(); }, false};
  TripleVerdict v = check_triple(t, with_credits(0));
  EXPECT_TRUE(v.passed());
  EXPECT_TRUE(v.vacuous);
}

TEST(Triple, FreshAddressesBecomeOwned) {
  HoareTriple t{credits(1), ref_new(5), [](const Value& r) { return points_to(r.as_addr(), 5); }, false};
  EXPECT_TRUE(check_triple(t, with_credits(1)).passed());
}

TEST(Triple, CatalogIsValid) {
  auto rep = check_triple_sampled(testsupport::random_primitive_case, 500, 1);
  EXPECT_EQ(rep.passes, 500u);
  EXPECT_EQ(rep.vacuous, 0u);
  EXPECT_FALSE(rep.counterexample.has_value());
}

TEST(Triple, FrameRule) {
  auto rep = check_triple_sampled(testsupport::framed_case, 1000, 100);
  EXPECT_EQ(rep.passes, 1000u);
  EXPECT_EQ(rep.vacuous, 0u);
}

TEST(Triple, TopAbsorbingMonotoneInCredits) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    SampledCase c = testsupport::random_primitive_case(seed);
    if (!c.triple.top_absorbing) continue;
    for (std::uint64_t k = 1; k <= 3; ++k) {
      SampledCase d = c;
      d.model.credits += k;
      d.triple.pre = d.triple.pre * credits(k);
      TripleVerdict v = check_triple(d.triple, d.model);
      EXPECT_TRUE(v.passed() && !v.vacuous);
    }
  }
}

TEST(Sampled, UnderCreditedCounterexampleReplays) {
  CaseGenerator gen = [](std::uint64_t seed) {
    SampledCase c;
    std::uint64_t n = 16 + seed % 3;
    c.triple.pre = credits(n);
    c.triple.prog = array_new(n, 0);
    c.triple.post = [](const Value&) { return emp(); };
    c.triple.top_absorbing = true;
    c.model.credits = n;
    return c;
  };
  auto rep = check_triple_sampled(gen, 10, 42);
  ASSERT_TRUE(rep.counterexample.has_value());
  EXPECT_EQ(rep.counterexample->seed, 42u);
  std::string text = rep.counterexample->to_text();
  Counterexample back = parse_counterexample(text);
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.verdict, rep.counterexample->verdict);
  EXPECT_TRUE(replay(gen, back));
}

TEST(Sampled, UnsatisfiablePreIsAllVacuous) {
  CaseGenerator gen = [](std::uint64_t) {
    SampledCase c;
    c.triple.pre = pure(false);
    c.triple.prog = return_pure(0);
    c.triple.post = [](const Value&) { return emp(); };
    return c;
  };
  auto rep = check_triple_sampled(gen, 20, 0);
  EXPECT_TRUE(rep.all_vacuous());
  EXPECT_EQ(rep.generator_invalid, 20u);
  EXPECT_FALSE(rep.counterexample.has_value());
}
