#pragma once

#include <algorithm>
#include <cstdint>

#include "timecredit/algorithms/sorting.hpp"

namespace timecredit::algo {

// ----------------------------------------------------------------- Karatsuba

/// dst[off + i] += sign * src[i] for the last r of len cells of src.
inline void vec_loop(Exec& ex, Addr dst, Addr src, std::uint64_t off, std::uint64_t len, std::uint64_t r, int sign) {
  auto f = ex.frame("vec_loop_time", {{"r", I(r)}});
  if (r == 0) {
    ex.ret();
    return;
  }
  std::uint64_t i = len - r;
  Value a = ex.nth(dst, off + i), b = ex.nth(src, i);
  ex.upd(dst, off + i, Value(sign > 0 ? Int(a.as_int() + b.as_int()) : Int(a.as_int() - b.as_int())));
  ex.call([] { return call("vec_loop_time", var("r") - nat(1)); },
          [&] { vec_loop(ex, dst, src, off, len, r - 1, sign); });
}

/// Product of two equal-length coefficient arrays (length 2n - 1, or 0).
inline Addr karatsuba(Exec& ex, Addr P, Addr Q) {
  std::uint64_t n0 = peek_len(ex, P);
  if (peek_len(ex, Q) != n0) ex.machine().fail("karatsuba needs equal lengths");
  auto f = ex.frame("karatsuba_time", {{"n", I(n0)}});
  std::uint64_t n = ex.len(P);
  if (n == 0) return ex.ret(ex.array_new(0, Value(0), 1)).as_addr();
  if (n == 1) {
    Value a = ex.nth(P, 0), b = ex.nth(Q, 0);
    return ex.ret(ex.array_of_list({Value(Int(a.as_int() * b.as_int()))}, 2)).as_addr();
  }
  std::uint64_t k = (n + 1) / 2, h = n / 2;
  Term tn = var("n"), tk = var("k"), th = var("h");
  ex.let("k", tcdiv(tn, nat(2)), I(k));
  ex.let("h", tdiv(tn, nat(2)), I(h));
  Term lo = nat(2) * tk - nat(1), hi = nat(2) * th - nat(1);
  Addr P0 = ex.atake(k, P, TimeExpr(tk) + 1), P1 = ex.adrop(k, P, TimeExpr(th) + 1);
  Addr Q0 = ex.atake(k, Q, TimeExpr(tk) + 1), Q1 = ex.adrop(k, Q, TimeExpr(th) + 1);
  auto kt = [](Term t) { return [=] { return call("karatsuba_time", t); }; };
  auto vt = [](Term t) { return [=] { return call("vec_loop_time", t); }; };
  Addr Z0 = ex.call(kt(tk), [&] { return karatsuba(ex, P0, Q0); });
  Addr Z2 = ex.call(kt(th), [&] { return karatsuba(ex, P1, Q1); });
  ex.call(vt(th), [&] { vec_loop(ex, P0, P1, 0, h, h, +1); });
  ex.call(vt(th), [&] { vec_loop(ex, Q0, Q1, 0, h, h, +1); });
  Addr Z1 = ex.call(kt(tk), [&] { return karatsuba(ex, P0, Q0); });
  ex.call(vt(lo), [&] { vec_loop(ex, Z1, Z0, 0, 2 * k - 1, 2 * k - 1, -1); });
  ex.call(vt(hi), [&] { vec_loop(ex, Z1, Z2, 0, 2 * h - 1, 2 * h - 1, -1); });
  Addr R = ex.array_new(2 * n - 1, Value(0), TimeExpr(nat(2) * tn - nat(1)) + 1);
  ex.call(vt(lo), [&] { vec_loop(ex, R, Z0, 0, 2 * k - 1, 2 * k - 1, +1); });
  ex.call(vt(lo), [&] { vec_loop(ex, R, Z1, k, 2 * k - 1, 2 * k - 1, +1); });
  ex.call(vt(hi), [&] { vec_loop(ex, R, Z2, 2 * k, 2 * h - 1, 2 * h - 1, +1); });
  return ex.ret(R).as_addr();
}

// ------------------------------------------------------------------ knapsack

struct KnapsackArrays {
  Addr weights, values, table;
  std::uint64_t W;
};

/// One item against capacities c = r - 1 down to its weight.
inline void cap_loop(Exec& ex, const KnapsackArrays& k, const Int& w, const Int& v, std::uint64_t r) {
  auto f = ex.frame("cap_loop_time", {{"r", I(r)}});
  if (r == 0 || Int(r - 1) < w) {
    ex.ret();
    return;
  }
  std::uint64_t c = r - 1;
  Value a = ex.nth(k.table, c), b = ex.nth(k.table, c - w.convert_to<std::uint64_t>());
  ex.upd(k.table, c, Value(std::max(a.as_int(), Int(b.as_int() + v))));
  ex.call([] { return call("cap_loop_time", var("r") - nat(1)); }, [&] { cap_loop(ex, k, w, v, r - 1); });
}

inline void items_loop(Exec& ex, const KnapsackArrays& k, std::uint64_t i) {
  auto f = ex.frame("items_time", {{"n", I(i)}, {"W", I(k.W)}});
  if (i == 0) {
    ex.ret();
    return;
  }
  Int w = ex.nth(k.weights, i - 1).as_int(), v = ex.nth(k.values, i - 1).as_int();
  Term tW = var("W");
  ex.call([=] { return call("cap_loop_time", tW + nat(1)); }, [&] { cap_loop(ex, k, w, v, k.W + 1); });
  ex.call([=] { return call("items_time", var("n") - nat(1), tW); }, [&] { items_loop(ex, k, i - 1); });
}

/// Best total value of a subset of items with total weight <= W.
inline Value knapsack(Exec& ex, Addr weights, Addr values, std::uint64_t W) {
  auto f = ex.frame("knapsack_time", {{"n", I(peek_len(ex, weights))}, {"W", I(W)}});
  std::uint64_t n = ex.len(weights);
  Addr D = ex.array_new(W + 1, Value(0), TimeExpr(var("W") + nat(1)) + 1);
  KnapsackArrays k{weights, values, D, W};
  ex.call([] { return call("items_time", var("n"), var("W")); }, [&] { items_loop(ex, k, n); });
  return ex.ret(ex.nth(D, W));
}

}  // namespace timecredit::algo
