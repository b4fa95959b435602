#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>

#include "timecredit/algorithms/exec.hpp"

namespace timecredit::algo {

inline std::uint64_t peek_len(Exec& ex, Addr a) { return ex.machine().heap().array(a).size(); }
inline Int I(std::uint64_t x) { return Int(x); }

// ---------------------------------------------------------------- merge sort

/// Merges A[i..] and B[j..] into X[i + j ..]; one step per output cell.
inline void merge_loop(Exec& ex, Addr A, Addr B, Addr X, std::uint64_t na, std::uint64_t nb, std::uint64_t i,
                       std::uint64_t j) {
  std::uint64_t r = na + nb - i - j;
  auto f = ex.frame("merge_loop_time", {{"r", I(r)}});
  if (r == 0) {
    ex.ret();
    return;
  }
  bool from_a;
  if (i < na && j < nb) {
    Value a = ex.nth(A, i), b = ex.nth(B, j);
    from_a = a.as_int() <= b.as_int();
    ex.upd(X, i + j, from_a ? a : b);
  } else {
    from_a = i < na;
    ex.upd(X, i + j, from_a ? ex.nth(A, i) : ex.nth(B, j));
  }
  ex.call([] { return call("merge_loop_time", var("r") - nat(1)); },
          [&] { merge_loop(ex, A, B, X, na, nb, from_a ? i + 1 : i, from_a ? j : j + 1); });
}

inline void mergeinto(Exec& ex, Addr A, Addr B, Addr X, std::uint64_t na, std::uint64_t nb) {
  auto f = ex.frame("mergeinto_time", {{"n", I(na + nb)}});
  ex.call([] { return call("merge_loop_time", var("n")); }, [&] { merge_loop(ex, A, B, X, na, nb, 0, 0); });
}

/// Sorts X in place; scratch halves come from atake / adrop.
inline void merge_sort(Exec& ex, Addr X) {
  auto f = ex.frame("merge_sort_time", {{"n", I(peek_len(ex, X))}});
  std::uint64_t n = ex.len(X);
  if (n <= 1) {
    ex.ret();
    return;
  }
  std::uint64_t m = n / 2;
  Term tn = var("n"), tm = var("m");
  ex.let("m", tdiv(tn, nat(2)), I(m));
  Addr A = ex.atake(m, X, call("atake_time", tn));
  Addr B = ex.adrop(m, X, call("adrop_time", tn));
  ex.call([=] { return call("merge_sort_time", tm); }, [&] { merge_sort(ex, A); });
  ex.call([=] { return call("merge_sort_time", tn - tm); }, [&] { merge_sort(ex, B); });
  ex.call([=] { return call("mergeinto_time", tn); }, [&] { mergeinto(ex, A, B, X, m, n - m); });
  ex.ret();
}

// ------------------------------------------------------------ insertion sort

/// Sinks X[lo + j] into the sorted run X[lo .. lo + j).
inline void insert(Exec& ex, Addr X, std::uint64_t lo, std::uint64_t j) {
  auto f = ex.frame("insert_time", {{"r", I(j)}});
  if (j == 0) {
    ex.ret();
    return;
  }
  Value x = ex.nth(X, lo + j - 1), y = ex.nth(X, lo + j);
  if (x.as_int() <= y.as_int()) {
    ex.ret();
    return;
  }
  ex.upd(X, lo + j - 1, y);
  ex.upd(X, lo + j, x);
  ex.call([] { return call("insert_time", var("r") - nat(1)); }, [&] { insert(ex, X, lo, j - 1); });
}

/// Sorts X[lo .. lo + n).
inline void isort_prefix(Exec& ex, Addr X, std::uint64_t lo, std::uint64_t n) {
  auto f = ex.frame("isort_prefix_time", {{"n", I(n)}});
  if (n == 0) {
    ex.ret();
    return;
  }
  Term tn = var("n");
  ex.call([=] { return call("isort_prefix_time", tn - nat(1)); }, [&] { isort_prefix(ex, X, lo, n - 1); });
  ex.call([=] { return call("insert_time", tn - nat(1)); }, [&] { insert(ex, X, lo, n - 1); });
}

inline void insertion_sort(Exec& ex, Addr X) {
  auto f = ex.frame("insertion_sort_time", {{"n", I(peek_len(ex, X))}});
  std::uint64_t n = ex.len(X);
  ex.call([] { return call("isort_prefix_time", var("n")); }, [&] { isort_prefix(ex, X, 0, n); });
}

// ------------------------------------------------------------- binary search

inline Value bsearch(Exec& ex, Addr A, const Int& key, std::uint64_t lo, std::uint64_t hi) {
  std::uint64_t n = hi - lo;
  auto f = ex.frame("bsearch_time", {{"n", I(n)}});
  if (n == 0) return ex.ret(Value(-1));
  std::uint64_t mid = lo + n / 2;
  Value x = ex.nth(A, mid);
  if (x.as_int() == key) return ex.ret(Value(mid));
  Term tn = var("n"), half = tdiv(tn, nat(2));
  if (key < x.as_int()) {
    return ex.call([=] { return call("bsearch_time", half); }, [&] { return bsearch(ex, A, key, lo, mid); });
  }
  // The upper part has n - n div 2 - 1 <= n div 2 elements.
  Term upper = tn - half - nat(1);
  ex.hint(call("bsearch_time", half), call("bsearch_time", upper), "bsearch_upper_half");
  return ex.call([=] { return call("bsearch_time", upper); }, [&] { return bsearch(ex, A, key, mid + 1, hi); });
}

/// Position of key in sorted A, or -1.
inline Value binary_search(Exec& ex, Addr A, const Int& key) {
  auto f = ex.frame("binary_search_time", {{"n", I(peek_len(ex, A))}});
  std::uint64_t n = ex.len(A);
  return ex.call([] { return call("bsearch_time", var("n")); }, [&] { return bsearch(ex, A, key, 0, n); });
}

// -------------------------------------------------------------------- select

/// Writes the lower median of each group of five of X[lo .. hi) into M.
inline void group_loop(Exec& ex, Addr X, std::uint64_t lo, std::uint64_t hi, Addr M, std::uint64_t j,
                       std::uint64_t groups) {
  auto f = ex.frame("group_loop_time", {{"r", I(groups - j)}});
  if (j == groups) {
    ex.ret();
    return;
  }
  std::uint64_t s = std::min<std::uint64_t>(5, hi - (lo + 5 * j));
  std::vector<Int> g;
  for (std::uint64_t t = 0; t < s; ++t) g.push_back(ex.nth(X, lo + 5 * j + t).as_int());
  std::sort(g.begin(), g.end());
  ex.upd(M, j, Value(g[(s - 1) / 2]));
  ex.call([] { return call("group_loop_time", var("r") - nat(1)); },
          [&] { group_loop(ex, X, lo, hi, M, j + 1, groups); });
}

/// Three-way partition of X[lo .. hi) around p; on return
/// X[lo .. lt) < p, X[lt .. gt) = p, X[gt .. hi) > p.
inline void part_loop(Exec& ex, Addr X, const Int& p, std::uint64_t& lt, std::uint64_t mid, std::uint64_t& gt) {
  auto f = ex.frame("part_loop_time", {{"r", I(gt - mid)}});
  if (mid == gt) {
    ex.ret();
    return;
  }
  Value x = ex.nth(X, mid);
  if (x.as_int() < p) {
    Value y = ex.nth(X, lt);
    ex.upd(X, lt, x);
    ex.upd(X, mid, y);
    ++lt;
    ++mid;
  } else if (x.as_int() > p) {
    Value y = ex.nth(X, gt - 1);
    ex.upd(X, gt - 1, x);
    ex.upd(X, mid, y);
    --gt;
  } else {
    ++mid;
  }
  ex.call([] { return call("part_loop_time", var("r") - nat(1)); }, [&] { part_loop(ex, X, p, lt, mid, gt); });
}

inline std::pair<std::uint64_t, std::uint64_t> partition(Exec& ex, Addr X, std::uint64_t lo, std::uint64_t hi,
                                                         const Int& p) {
  auto f = ex.frame("partition_time", {{"n", I(hi - lo)}});
  std::uint64_t lt = lo, gt = hi;
  ex.call([] { return call("part_loop_time", var("n")); }, [&] { part_loop(ex, X, p, lt, lo, gt); });
  return {lt, gt};
}

/// The i-th smallest element of X[lo .. hi), 0-indexed; permutes the range.
inline Value select_range(Exec& ex, Addr X, std::uint64_t lo, std::uint64_t hi, std::uint64_t i) {
  std::uint64_t n = hi - lo;
  auto f = ex.frame("select_time", {{"n", I(n)}});
  Term tn = var("n"), tg = var("g"), tl = var("l");
  if (n <= 10) {
    ex.call([=] { return call("isort_prefix_time", tn); }, [&] { isort_prefix(ex, X, lo, n); });
    return ex.ret(ex.nth(X, lo + i));
  }
  std::uint64_t g = (n + 4) / 5;
  ex.let("g", tcdiv(tn, nat(5)), I(g));
  Addr M = ex.array_new(g, Value(0), TimeExpr(tg) + 1);
  ex.call([=] { return call("group_loop_time", tg); }, [&] { group_loop(ex, X, lo, hi, M, 0, g); });
  Value pivot = ex.call([=] { return call("select_time", tg); }, [&] { return select_range(ex, M, 0, g, g / 2); });
  auto [lt, gt] =
      ex.call([=] { return call("partition_time", tn); }, [&] { return partition(ex, X, lo, hi, pivot.as_int()); });
  std::uint64_t below = lt - lo, equal = gt - lt;
  if (i >= below && i < below + equal) return ex.ret(pivot);
  std::uint64_t l = i < below ? below : hi - gt;
  ex.bind("l", I(l));
  ex.hint(call("select_time", tcdiv(nat(7) * tn, nat(10))), call("select_time", tl), "select_larger_part");
  if (i < below) {
    return ex.call([=] { return call("select_time", tl); }, [&] { return select_range(ex, X, lo, lt, i); });
  }
  return ex.call([=] { return call("select_time", tl); },
                 [&] { return select_range(ex, X, gt, hi, i - below - equal); });
}

inline Value select(Exec& ex, Addr X, std::uint64_t i) {
  auto f = ex.frame("select_main_time", {{"n", I(peek_len(ex, X))}});
  std::uint64_t n = ex.len(X);
  if (i >= n) ex.machine().fail("select index out of range");
  return ex.call([] { return call("select_time", var("n")); }, [&] { return select_range(ex, X, 0, n, i); });
}

}  // namespace timecredit::algo
