#include <gtest/gtest.h>

#include <algorithm>
#include <optional>
#include <random>
#include <set>

#include "timecredit/algorithms/bundles.hpp"

using namespace timecredit;
using namespace timecredit::algo;

namespace {

// Arrays are allocated before the machine starts; go() hands out the executor.
struct Session {
  Heap h;
  std::optional<Machine> m;
  std::optional<Exec> ex;
  ObligationLog log;
  TimeDefs defs = standard_time_defs();

  Addr array(const std::vector<long long>& xs) { return h.alloc_array(bundle_detail::ints(xs)); }
  Exec& go() {
    m.emplace(std::move(h));
    ex.emplace(*m, &log);
    return *ex;
  }
  Int cost() const { return Int(m->cost()); }
  std::vector<long long> read(Addr a) { return bundle_detail::read_ints(m->heap(), a); }
  AuditReport check() { return audit(log, defs); }
};

Int T(const TimeDefs& d, const char* f, std::initializer_list<long long> a) { return d.eval(f, a); }

}  // namespace

// ---------------------------------------------------------------- merge sort

TEST(MergeSort, EmptyCostsTheBaseConstant) {
  Session s;
  Addr X = s.array({});
  merge_sort(s.go(), X);
  EXPECT_EQ(s.cost(), 2u);
  EXPECT_EQ(T(s.defs, "merge_sort_time", {0}), 2);
  EXPECT_TRUE(s.check().ok());
}

TEST(MergeSort, SingletonCostsTheBaseConstant) {
  Session s;
  Addr X = s.array({9});
  merge_sort(s.go(), X);
  EXPECT_EQ(s.cost(), 2u);
}

TEST(MergeSort, ThreeElements) {
  Session s;
  Addr X = s.array({3, 1, 2});
  merge_sort(s.go(), X);
  EXPECT_EQ(s.read(X), (std::vector<long long>{1, 2, 3}));
  EXPECT_LE(s.cost(), T(s.defs, "merge_sort_time", {3}));
  EXPECT_TRUE(s.check().ok());
}

TEST(MergeSort, ExhaustiveSmallAndRandomLarge) {
  TimeDefs d = standard_time_defs();
  for (std::uint64_t n = 0; n <= 8; ++n) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      ObligationLog log;
      auto r = bundle_detail::run_merge_sort(n, seed, d, &log);
      ASSERT_TRUE(r.correct && r.within() && audit(log, d).ok()) << n << " " << seed;
    }
  }
  auto r = bundle_detail::run_merge_sort(512, 7, d, nullptr);
  EXPECT_TRUE(r.correct);
  EXPECT_TRUE(r.within());
}

// ----------------------------------------------------------------- Karatsuba

TEST(Karatsuba, SquareOfOnePlusX) {
  Session s;
  Addr P = s.array({1, 1}), Q = s.array({1, 1});
  Addr R = karatsuba(s.go(), P, Q);
  EXPECT_EQ(s.read(R), (std::vector<long long>{1, 2, 1}));
  EXPECT_TRUE(s.check().ok());
}

TEST(Karatsuba, ConstantsCostTheBaseCase) {
  Session s;
  Addr P = s.array({2}), Q = s.array({3});
  Addr R = karatsuba(s.go(), P, Q);
  EXPECT_EQ(s.read(R), (std::vector<long long>{6}));
  EXPECT_EQ(s.cost(), T(s.defs, "karatsuba_time", {1}));
}

TEST(Karatsuba, RejectsUnequalLengths) {
  Session s;
  Addr P = s.array({1, 2}), Q = s.array({1});
  EXPECT_THROW(karatsuba(s.go(), P, Q), Failure);
}

TEST(Karatsuba, RandomDegree63MatchesSchoolbook) {
  TimeDefs d = standard_time_defs();
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    ObligationLog log;
    auto r = bundle_detail::run_karatsuba(64, seed, d, &log);
    EXPECT_TRUE(r.correct);
    EXPECT_TRUE(r.within());
    EXPECT_TRUE(audit(log, d).ok());
  }
}

// -------------------------------------------------------------------- select

TEST(Select, Median) {
  Session s;
  Addr X = s.array({5, 1, 4, 2, 3});
  EXPECT_EQ(select(s.go(), X, 2), Value(3));
  EXPECT_TRUE(s.check().ok());
}

TEST(Select, Singleton) {
  Session s;
  Addr X = s.array({7});
  EXPECT_EQ(select(s.go(), X, 0), Value(7));
}

TEST(Select, IndexOutOfRange) {
  Session s;
  Addr X = s.array({1, 2});
  EXPECT_THROW(select(s.go(), X, 2), Failure);
}

TEST(Select, RandomQueriesOnLength1000) {
  TimeDefs d = standard_time_defs();
  std::mt19937_64 rng(3);
  std::vector<long long> xs(1000);
  for (auto& x : xs) x = static_cast<long long>(rng() % 500);
  auto sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  std::size_t hints = 0;
  for (int q = 0; q < 50; ++q) {
    Heap h;
    Addr X = h.alloc_array(bundle_detail::ints(xs));
    Machine m(std::move(h));
    ObligationLog log;
    Exec ex(m, &log);
    std::uint64_t i = rng() % xs.size();
    EXPECT_EQ(select(ex, X, i).as_int(), sorted[i]);
    EXPECT_LE(Int(m.cost()), d.eval("select_main_time", {1000}));
    auto rep = audit(log, d);
    ASSERT_TRUE(rep.ok()) << rep.failures.front();
    EXPECT_EQ(rep.hint_labels(), std::set<std::string>{"select_larger_part"});
    hints += rep.hints_used["select_larger_part"];
  }
  EXPECT_GT(hints, 0u);
}

TEST(Select, TimeFunctionMonotoneOnPrefix) {
  TimeDefs d = standard_time_defs();
  Int prev = 0;
  for (long long n = 0; n <= 10000; ++n) {
    Int v = d.eval("select_time", {n});
    ASSERT_GE(v, prev) << n;
    prev = v;
  }
}

// ------------------------------------------------------------------ knapsack

TEST(Knapsack, TwoItems) {
  Session s;
  Addr W = s.array({1, 2}), V = s.array({1, 3});
  EXPECT_EQ(knapsack(s.go(), W, V, 2), Value(3));
  EXPECT_TRUE(s.check().ok());
}

TEST(Knapsack, NoItems) {
  Session s;
  Addr W = s.array({}), V = s.array({});
  EXPECT_EQ(knapsack(s.go(), W, V, 5), Value(0));
  EXPECT_LE(s.cost(), T(s.defs, "knapsack_time", {0, 5}));
}

TEST(Knapsack, TenRandomItemsAgainstBruteForce) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<long long> w(10), v(10);
    for (auto& x : w) x = static_cast<long long>(rng() % 12);
    for (auto& x : v) x = static_cast<long long>(rng() % 30);
    Session s;
    Addr Wa = s.array(w), Va = s.array(v);
    Value got = knapsack(s.go(), Wa, Va, 30);
    EXPECT_EQ(got.as_int(), bundle_detail::knapsack_oracle(w, v, 30));
    EXPECT_LE(s.cost(), T(s.defs, "knapsack_time", {10, 30}));
    EXPECT_TRUE(s.check().ok());
  }
}

// ------------------------------------------------------------- binary search

TEST(BinarySearch, FindsPresentKey) {
  Session s;
  Addr A = s.array({1, 3, 5, 7});
  EXPECT_EQ(binary_search(s.go(), A, 5), Value(2));
}

TEST(BinarySearch, EmptyCostsTheBase) {
  Session s;
  Addr A = s.array({});
  EXPECT_EQ(binary_search(s.go(), A, 1), Value(-1));
  EXPECT_EQ(s.cost(), T(s.defs, "binary_search_time", {0}));
}

TEST(BinarySearch, HundredProbesOn1024) {
  TimeDefs d = standard_time_defs();
  std::set<std::string> labels;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    ObligationLog log;
    auto r = bundle_detail::run_binary_search(1024, seed, d, &log);
    ASSERT_TRUE(r.correct) << r.detail;
    ASSERT_TRUE(r.within());
    auto rep = audit(log, d);
    ASSERT_TRUE(rep.ok()) << rep.failures.front();
    for (const auto& l : rep.hint_labels()) labels.insert(l);
  }
  EXPECT_EQ(labels, std::set<std::string>{"bsearch_upper_half"});
}

// ------------------------------------------------------------ insertion sort

TEST(InsertionSort, TwoElements) {
  Session s;
  Addr X = s.array({2, 1});
  insertion_sort(s.go(), X);
  EXPECT_EQ(s.read(X), (std::vector<long long>{1, 2}));
}

TEST(InsertionSort, SortedInputUnchangedWithinBound) {
  Session s;
  Addr X = s.array({1, 2, 3, 4, 5, 6, 7, 8});
  insertion_sort(s.go(), X);
  EXPECT_EQ(s.read(X), (std::vector<long long>{1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_LE(s.cost(), T(s.defs, "insertion_sort_time", {8}));
}

TEST(InsertionSort, ReverseInputMeetsTheBoundExactly) {
  Session s;
  std::vector<long long> xs;
  for (long long i = 20; i > 0; --i) xs.push_back(i);
  Addr X = s.array(xs);
  insertion_sort(s.go(), X);
  EXPECT_EQ(s.cost(), T(s.defs, "insertion_sort_time", {20}));
}

TEST(InsertionSort, Random256) {
  auto r = bundle_detail::run_insertion_sort(256, 5, standard_time_defs(), nullptr);
  EXPECT_TRUE(r.correct);
  EXPECT_TRUE(r.within());
}

// ------------------------------------------------------------- dynamic array

TEST(DynamicArray, CopiesOnlyWhenFull) {
  Heap h;
  DynArray d = dyn_empty(h);
  Machine m(std::move(h));
  Exec ex(m);
  std::vector<int> grew;
  for (int i = 1; i <= 8; ++i) {
    Addr before = d.arr;
    dyn_push(ex, d, Value(i * 10));
    if (!(d.arr == before)) grew.push_back(i);
  }
  EXPECT_EQ(grew, (std::vector<int>{1, 2, 3, 5}));
  for (int i = 0; i < 8; ++i) EXPECT_EQ(dyn_get(ex, d, i), Value((i + 1) * 10));
  EXPECT_EQ(dyn_len(ex, d), Value(8));
}

TEST(DynamicArray, GetBeyondLengthFails) {
  Heap h;
  DynArray d = dyn_empty(h);
  Machine m(std::move(h));
  Exec ex(m);
  dyn_push(ex, d, Value(1));
  EXPECT_THROW(dyn_get(ex, d, 1), Failure);
}

TEST(DynamicArray, RandomOpsAgreeWithVector) {
  auto r = bundle_detail::run_dynarray(2000, 4, standard_time_defs(), nullptr);
  EXPECT_TRUE(r.correct);
  EXPECT_TRUE(r.within());
}

// ----------------------------------------------------------------- skew heap

TEST(SkewHeap, DeleteMinAfterInserts) {
  Machine m;
  Exec ex(m);
  Value root;
  for (long long x : {3, 1, 2}) root = skew_insert(ex, root, x);
  auto [k, rest] = skew_del_min(ex, root);
  EXPECT_EQ(k, 1);
  EXPECT_EQ(tree::keys(m.heap(), rest).size(), 2u);
}

TEST(SkewHeap, MeldWithEmptyIsIdentity) {
  Machine m;
  Exec ex(m);
  Value h = skew_insert(ex, Value(), 5);
  std::uint64_t d = 0;
  EXPECT_EQ(meld(ex, Value(), h, d), h);
  EXPECT_EQ(meld(ex, h, Value(), d), h);
}

TEST(SkewHeap, DeleteMinOnEmptyFails) {
  Machine m;
  Exec ex(m);
  EXPECT_THROW(skew_del_min(ex, Value()), Failure);
}

TEST(SkewHeap, RandomOpsAgreeWithMultiset) {
  ObligationLog log;
  TimeDefs d = standard_time_defs();
  auto r = bundle_detail::run_skew(2000, 8, d, &log);
  EXPECT_TRUE(r.correct);
  EXPECT_TRUE(r.within());
  EXPECT_TRUE(audit(log, d).ok());
}

// ---------------------------------------------------------------- splay tree

namespace {
std::shared_ptr<tree::Shape> sh(long long k, std::shared_ptr<tree::Shape> l = nullptr,
                                std::shared_ptr<tree::Shape> r = nullptr) {
  return std::make_shared<tree::Shape>(tree::Shape{k, std::move(l), std::move(r)});
}
}  // namespace

TEST(SplayTree, TargetAtRootStays) {
  Heap h;
  Value t = tree::build(h, sh(2, sh(1)));
  Machine m(std::move(h));
  Exec ex(m);
  std::uint64_t d = 0;
  Value r = splay(ex, 2, t, d);
  EXPECT_EQ(tree::key(m.heap(), r), 2);
}

TEST(SplayTree, ZigBringsChildUp) {
  Heap h;
  Value t = tree::build(h, sh(2, sh(1)));
  Machine m(std::move(h));
  Exec ex(m);
  std::uint64_t d = 0;
  Value r = splay(ex, 1, t, d);
  EXPECT_EQ(tree::key(m.heap(), r), 1);
  EXPECT_EQ(tree::keys(m.heap(), r), (std::vector<Int>{1, 2}));
}

TEST(SplayTree, PreservesOrderAndKeysOnRandomTrees) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    Machine m;
    Exec ex(m);
    Value root;
    std::set<long long> keys;
    int n = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      long long k = static_cast<long long>(rng() % 100);
      root = splay_insert(ex, root, k);
      keys.insert(k);
    }
    long long x = static_cast<long long>(rng() % 100);
    std::uint64_t d = 0;
    Value r = splay(ex, x, root, d);
    auto ks = tree::keys(m.heap(), r);
    ASSERT_TRUE(tree::is_bst(m.heap(), r));
    ASSERT_EQ(ks.size(), keys.size());
    ASSERT_TRUE(std::equal(ks.begin(), ks.end(), keys.begin(), [](const Int& a, long long b) { return a == b; }));
    if (keys.count(x)) ASSERT_EQ(tree::key(m.heap(), r), x);
  }
}

TEST(SplayTree, LookupFindsInsertedKeysOnly) {
  Machine m;
  Exec ex(m);
  Value root;
  for (long long x : {5, 3, 8, 1}) root = splay_insert(ex, root, x);
  auto [found, r1] = splay_lookup(ex, root, 3);
  EXPECT_TRUE(found);
  auto [missing, r2] = splay_lookup(ex, r1, 4);
  EXPECT_FALSE(missing);
  EXPECT_EQ(tree::keys(m.heap(), r2).size(), 4u);
}

// ------------------------------------------------------------ time functions

TEST(TimeFunctions, TakeAndDropCostsAreExact) {
  TimeDefs d = standard_time_defs();
  for (std::uint64_t n = 0; n <= 512; ++n) {
    Heap h;
    Addr X = h.alloc_array(std::vector<Value>(n, Value(0)));
    Machine m(std::move(h));
    m.atake(n / 2, X);
    ASSERT_EQ(Int(m.cost()), d.eval("atake_time", {Int(n)}));
    m.adrop(n / 2, X);
    ASSERT_EQ(Int(m.cost()), d.eval("atake_time", {Int(n)}) + d.eval("adrop_time", {Int(n)}));
  }
}

TEST(TimeFunctions, AuxiliariesRegisterAsLinear) {
  const BoundRegistry& reg = standard_registry();
  for (const char* f : {"atake_time", "adrop_time", "mergeinto_time"}) {
    EXPECT_EQ(std::get<PolyLog>(reg.lookup(f).cls), (PolyLog{1, 0})) << f;
    EXPECT_EQ(reg.lookup(f).provenance, "swept");
  }
  // 2 + atake_time n + adrop_time n + mergeinto_time n is linear.
  AsymExpr e;
  e.summands.push_back({2, {}, {}});
  for (const char* f : {"atake_time", "adrop_time", "mergeinto_time"}) {
    e.summands.push_back({1, {}, Summand::Call{f, {InnerArg::affine(0)}}});
  }
  EXPECT_TRUE(same_class(analyze_expr(e, reg), PolyLog{1, 0}));
}

TEST(TimeFunctions, RegistrationRejectsAnUnsoundBound) {
  TimeDefs bad = standard_time_defs().with_fault("atake_time", 0);
  BoundRegistry reg;
  EXPECT_THROW(register_auxiliaries(bad, reg, 64), RegistrationRejected);
  EXPECT_FALSE(reg.contains("atake_time"));
}

TEST(TimeFunctions, LoopsEvaluateInClosedForm) {
  TimeDefs d = standard_time_defs();
  EXPECT_EQ(T(d, "vec_loop_time", {0}), 1);
  EXPECT_EQ(T(d, "vec_loop_time", {1000000}), 3000001);
  EXPECT_EQ(T(d, "items_time", {3, 4}), 1 + 3 * (2 + (1 + 3 * 5)));
  EXPECT_EQ(T(d.with_fault("vec_loop_time", 1), "vec_loop_time", {10}), 21);
}

// ----------------------------------------------------------------- derivation

TEST(Derivation, ReproducesEveryClaim) {
  TimeDefs d = standard_time_defs();
  for (const auto& b : standard_bundles()) {
    auto v = class_check(b, d, b.claim, standard_registry());
    EXPECT_TRUE(v.pass) << b.name << ": " << v.detail;
  }
}

TEST(Derivation, MergeSortIsBalanced) {
  BoundRegistry reg = standard_registry();
  Deriver dv(standard_time_defs(), reg);
  const Derivation& r = dv.derive("merge_sort_time");
  ASSERT_TRUE(r.ab);
  EXPECT_EQ(r.ab->case_tag, CaseTag::Balanced);
  EXPECT_NEAR(static_cast<double>(r.ab->p), 1.0, 1e-6);
  EXPECT_EQ(r.spec->x0, 2u);
}

TEST(Derivation, KnapsackUsesTheTwoVariableRule) {
  BoundRegistry reg;
  Deriver dv(standard_time_defs(), reg);
  EXPECT_EQ(dv.derive("items_time").method, "linear recurrence");
  EXPECT_TRUE(same_class(dv.derive("knapsack_time").cls, Class2(PolyLog2{1, 0, 1, 0})));
}

TEST(Derivation, PerturbedClaimsFail) {
  TimeDefs d = standard_time_defs();
  for (const auto& b : standard_bundles()) {
    LandauClass up = b.claim;
    if (auto* p = std::get_if<PolyLog>(&up)) {
      p->a += 1;
    } else if (auto* r = std::get_if<RealPower>(&up)) {
      r->p += 1;
    } else {
      auto& c = std::get<Class2>(up);
      c.members[0].a += 1;
    }
    EXPECT_FALSE(class_check(b, d, up, standard_registry()).pass) << b.name;
  }
}

// ------------------------------------------------------------ bundles, audit

TEST(Bundles, NineCaseStudiesWithDeclaredHints) {
  TimeDefs d = standard_time_defs();
  auto bs = standard_bundles();
  ASSERT_EQ(bs.size(), 9u);
  for (const auto& b : bs) {
    std::set<std::string> used;
    for (std::uint64_t n : {0, 1, 5, 17, 64}) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        CheckedRun c = checked_run(b, n, seed, d);
        ASSERT_TRUE(c.pass()) << b.name << " n=" << n << " seed=" << seed << " "
                              << (c.audit.failures.empty() ? c.run.detail : c.audit.failures.front());
        for (const auto& l : c.audit.hint_labels()) used.insert(l);
      }
    }
    EXPECT_EQ(used, std::set<std::string>(b.hints.begin(), b.hints.end())) << b.name;
  }
}

TEST(Bundles, ProbesNoticeFaultsInTheirFunctions) {
  TimeDefs d = standard_time_defs();
  auto b = *find_bundle("merge_sort");
  EXPECT_FALSE(probe_detects(b, d));
  EXPECT_TRUE(probe_detects(b, d.with_fault("merge_sort_time", 1)));
  EXPECT_TRUE(probe_detects(b, d.with_fault("merge_loop_time", 1)));
  auto fs = probe_functions(b, d);
  EXPECT_TRUE(fs.count("atake_time"));
  EXPECT_TRUE(fs.count("merge_loop_time"));
}

TEST(Bundles, ReportRowsPass) {
  TimeDefs d = standard_time_defs();
  for (const auto& b : standard_bundles()) {
    ReportRow r = report_row(b, d, standard_registry(), {0, 9, 40}, 1, 3);
    EXPECT_TRUE(r.pass()) << b.name << ": " << r.cls.detail;
    EXPECT_LE(r.max_ratio, 1.0L);
  }
}
