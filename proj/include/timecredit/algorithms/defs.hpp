#pragma once

#include "timecredit/algorithms/time_defs.hpp"

namespace timecredit {

namespace defs_detail {

inline bool eq0(const Args& a) { return a[0] == 0; }

/// r = 0 -> base; otherwise step + self(r - 1). Every loop is written this way.
inline TimeDef chain(const std::string& name, int base, int step) {
  Term r = var("r");
  return {name, {"r"}, {when("r = 0", eq0, base), otherwise(TimeExpr(step) + call(name, r - nat(1)))}};
}

}  // namespace defs_detail

/// Runtime functions of every procedure in the case studies. Each body has
/// one summand per call site plus the constant cost of its primitives.
inline TimeDefs standard_time_defs() {
  using defs_detail::chain;
  using defs_detail::eq0;
  TimeDefs d;
  Term n = var("n"), W = var("W"), c = var("c"), dd = var("d");
  Term half = tdiv(n, nat(2)), up = tcdiv(n, nat(2));

  // Merge sort.
  d.add({"atake_time", {"n"}, {otherwise(TimeExpr(half) + 1)}});
  d.add({"adrop_time", {"n"}, {otherwise(TimeExpr(n - half) + 1)}});
  d.add(chain("merge_loop_time", 1, 3));
  d.add({"mergeinto_time", {"n"}, {otherwise(call("merge_loop_time", n))}});
  d.add({"merge_sort_time",
         {"n"},
         {when("n <= 1", [](const Args& a) { return a[0] <= 1; }, 2),
          otherwise(TimeExpr(2) + call("atake_time", n) + call("adrop_time", n) + call("merge_sort_time", half) +
                    call("merge_sort_time", n - half) + call("mergeinto_time", n))}});

  // Insertion sort (also the base case of select).
  d.add(chain("insert_time", 1, 4));
  d.add({"isort_prefix_time",
         {"n"},
         {when("n = 0", eq0, 1),
          otherwise(call("isort_prefix_time", n - nat(1)) + call("insert_time", n - nat(1)))}});
  d.add({"insertion_sort_time", {"n"}, {otherwise(TimeExpr(1) + call("isort_prefix_time", n))}});

  // Binary search.
  d.add({"bsearch_time", {"n"}, {when("n = 0", eq0, 1), otherwise(TimeExpr(2) + call("bsearch_time", half))}});
  d.add({"binary_search_time", {"n"}, {otherwise(TimeExpr(1) + call("bsearch_time", n))}});

  // Selection by median of medians.
  Term groups = tcdiv(n, nat(5)), big = tcdiv(nat(7) * n, nat(10));
  d.add(chain("group_loop_time", 1, 6));
  d.add(chain("part_loop_time", 1, 4));
  d.add({"partition_time", {"n"}, {otherwise(call("part_loop_time", n))}});
  d.add({"select_time",
         {"n"},
         {when("n <= 10", [](const Args& a) { return a[0] <= 10; }, TimeExpr(2) + call("isort_prefix_time", n)),
          otherwise(TimeExpr(2) + TimeExpr(groups) + call("group_loop_time", groups) + call("select_time", groups) +
                    call("partition_time", n) + call("select_time", big))}});
  d.add({"select_main_time", {"n"}, {otherwise(TimeExpr(1) + call("select_time", n))}});

  // Karatsuba.
  d.add(chain("vec_loop_time", 1, 3));
  {
    Term lo = nat(2) * up - nat(1), hi = nat(2) * half - nat(1);
    TimeExpr body = TimeExpr(1) + TimeExpr(2) * (TimeExpr(up) + 1) + TimeExpr(2) * (TimeExpr(half) + 1) +
                    call("karatsuba_time", up) + call("karatsuba_time", half) +
                    TimeExpr(2) * call("vec_loop_time", half) + call("karatsuba_time", up) +
                    call("vec_loop_time", lo) + call("vec_loop_time", hi) + (TimeExpr(nat(2) * n - nat(1)) + 1) +
                    TimeExpr(2) * call("vec_loop_time", lo) + call("vec_loop_time", hi) + 1;
    d.add({"karatsuba_time",
           {"n"},
           {when("n = 0", eq0, 3), when("n = 1", [](const Args& a) { return a[0] == 1; }, 6), otherwise(body)}});
  }

  // 0/1 knapsack.
  d.add(chain("cap_loop_time", 1, 3));
  d.add({"items_time",
         {"n", "W"},
         {when("n = 0", eq0, 1),
          otherwise(call("items_time", n - nat(1), W) + TimeExpr(2) + call("cap_loop_time", W + nat(1)))}});
  d.add({"knapsack_time", {"n", "W"}, {otherwise(TimeExpr(3) + (TimeExpr(W + nat(1)) + 1) + call("items_time", n, W))}});

  // Dynamic array.
  d.add(chain("copy_time", 1, 2));
  d.add({"push_time",
         {"l", "c"},
         {when("l < c", [](const Args& a) { return a[0] < a[1]; }, 3),
          when("c = 0", [](const Args& a) { return a[1] == 0; }, TimeExpr(3) + 2 + call("copy_time", c)),
          otherwise(TimeExpr(3) + (TimeExpr(nat(2) * c) + 1) + call("copy_time", c))}});
  d.add({"get_time", {}, {otherwise(2)}});
  d.add({"len_time", {}, {otherwise(1)}});

  // Skew heap; d is the meld recursion depth.
  d.add({"meld_time", {"d"}, {when("d = 0", eq0, 1), otherwise(TimeExpr(7) + call("meld_time", dd - nat(1)))}});
  d.add({"sh_insert_time", {"d"}, {otherwise(TimeExpr(4) + call("meld_time", dd))}});
  d.add({"sh_del_min_time", {"d"}, {otherwise(TimeExpr(4) + call("meld_time", dd))}});

  // Splay tree; d is the number of two-level splay steps.
  d.add({"splay_time", {"d"}, {when("d = 0", eq0, 8), otherwise(TimeExpr(11) + call("splay_time", dd - nat(1)))}});
  d.add({"splay_insert_time", {"d"}, {otherwise(TimeExpr(8) + call("splay_time", dd))}});
  d.add({"splay_lookup_time", {"d"}, {otherwise(TimeExpr(2) + call("splay_time", dd))}});

  return d;
}

}  // namespace timecredit
