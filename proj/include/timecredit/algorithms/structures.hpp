#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "timecredit/algorithms/sorting.hpp"

namespace timecredit::algo {

// ------------------------------------------------------------- dynamic array

/// Growable array: backing array plus a logical length. Capacity is the
/// backing array's length; it starts at 0 and grows to max(1, 2 cap).
struct DynArray {
  Addr arr;
  std::uint64_t len = 0;
};

inline DynArray dyn_empty(Heap& h) { return {h.alloc_array({}), 0}; }

inline void copy_loop(Exec& ex, Addr src, Addr dst, std::uint64_t n, std::uint64_t r) {
  auto f = ex.frame("copy_time", {{"r", I(r)}});
  if (r == 0) {
    ex.ret();
    return;
  }
  std::uint64_t i = n - r;
  ex.upd(dst, i, ex.nth(src, i));
  ex.call([] { return call("copy_time", var("r") - nat(1)); }, [&] { copy_loop(ex, src, dst, n, r - 1); });
}

inline void dyn_push(Exec& ex, DynArray& d, const Value& v) {
  std::uint64_t c0 = peek_len(ex, d.arr);
  auto f = ex.frame("push_time", {{"l", I(d.len)}, {"c", I(c0)}});
  std::uint64_t cap = ex.len(d.arr);
  if (d.len < cap) {
    ex.upd(d.arr, d.len, v);
    ex.ret();
    ++d.len;
    return;
  }
  std::uint64_t ncap = cap == 0 ? 1 : 2 * cap;
  Addr B = ex.array_new(ncap, Value(0), cap == 0 ? TimeExpr(2) : TimeExpr(nat(2) * var("c")) + 1);
  ex.call([] { return call("copy_time", var("c")); }, [&] { copy_loop(ex, d.arr, B, cap, cap); });
  ex.upd(B, d.len, v);
  ex.ret();
  d.arr = B;
  ++d.len;
}

inline Value dyn_get(Exec& ex, const DynArray& d, std::uint64_t i) {
  auto f = ex.frame("get_time", {});
  if (i >= d.len) ex.machine().fail("index beyond length");
  return ex.ret(ex.nth(d.arr, i));
}

inline Value dyn_len(Exec& ex, const DynArray& d) {
  auto f = ex.frame("len_time", {});
  return ex.ret(Value(d.len));
}

// ---------------------------------------------------------------- tree nodes

/// Binary tree nodes are 3-cell arrays [key, left, right]; () is the leaf.
namespace tree {

inline bool leaf(const Value& t) { return t.is_unit(); }
inline const ValueList& node(const Heap& h, const Value& t) { return h.array(t.as_addr()); }
inline const Int& key(const Heap& h, const Value& t) { return node(h, t)[0].as_int(); }
inline const Value& left(const Heap& h, const Value& t) { return node(h, t)[1]; }
inline const Value& right(const Heap& h, const Value& t) { return node(h, t)[2]; }

/// Calls f(node, size(left), size(right)) for every node, post-order.
template <class F>
std::uint64_t fold_sizes(const Heap& h, const Value& t, F&& f) {
  // Explicit stack of (node, expanded?) to cope with path-shaped trees.
  const auto& arrays = h.arrays();
  auto get = [&](const Value& v) -> const ValueList& {
    auto it = arrays.find(v.as_addr().id);
    if (it == arrays.end()) throw Failure("dangling tree node");
    return it->second;
  };
  std::vector<std::pair<const Value*, bool>> st{{&t, false}};
  std::vector<std::uint64_t> sizes;
  while (!st.empty()) {
    auto [v, done] = st.back();
    st.pop_back();
    if (leaf(*v)) {
      sizes.push_back(0);
      continue;
    }
    const ValueList& nd = get(*v);
    if (!done) {
      st.push_back({v, true});
      st.push_back({&nd[2], false});
      st.push_back({&nd[1], false});
      continue;
    }
    std::uint64_t r = sizes.back();
    sizes.pop_back();
    std::uint64_t l = sizes.back();
    sizes.pop_back();
    f(*v, l, r);
    sizes.push_back(l + r + 1);
  }
  return sizes.back();
}

inline void inorder(const Heap& h, const Value& t, std::vector<Int>& out) {
  std::vector<Value> st;
  Value cur = t;
  while (!leaf(cur) || !st.empty()) {
    while (!leaf(cur)) {
      st.push_back(cur);
      cur = left(h, cur);
    }
    cur = st.back();
    st.pop_back();
    out.push_back(key(h, cur));
    cur = right(h, cur);
  }
}

inline std::vector<Int> keys(const Heap& h, const Value& t) {
  std::vector<Int> out;
  inorder(h, t, out);
  return out;
}

inline std::uint64_t size(const Heap& h, const Value& t) {
  return fold_sizes(h, t, [](const Value&, std::uint64_t, std::uint64_t) {});
}

/// Strictly increasing in-order keys.
inline bool is_bst(const Heap& h, const Value& t) {
  auto ks = keys(h, t);
  for (std::size_t i = 1; i < ks.size(); ++i) {
    if (!(ks[i - 1] < ks[i])) return false;
  }
  return true;
}

/// Every node's key is at most its children's keys.
inline bool is_heap_ordered(const Heap& h, const Value& t) {
  std::vector<Value> st{t};
  while (!st.empty()) {
    Value x = st.back();
    st.pop_back();
    if (leaf(x)) continue;
    for (const Value& c : {left(h, x), right(h, x)}) {
      if (!leaf(c) && key(h, c) < key(h, x)) return false;
      st.push_back(c);
    }
  }
  return true;
}

/// Builds a tree from nested (key, left, right) host data; for tests.
struct Shape {
  long long key;
  std::shared_ptr<Shape> l, r;
};
inline Value build(Heap& h, const std::shared_ptr<Shape>& s) {
  if (!s) return Unit{};
  Value l = build(h, s->l), r = build(h, s->r);
  return h.alloc_array({Value(s->key), l, r});
}

}  // namespace tree

// ----------------------------------------------------------------- skew heap

/// Melds along the right spines, swapping children at every step. `depth`
/// receives the number of recursive steps.
inline Value meld(Exec& ex, Value a, Value b, std::uint64_t& depth) {
  auto f = ex.frame("meld_time", {{"d", 0}});
  if (tree::leaf(a)) {
    depth = 0;
    return ex.ret(b);
  }
  if (tree::leaf(b)) {
    depth = 0;
    return ex.ret(a);
  }
  Value ka = ex.nth(a.as_addr(), 0), kb = ex.nth(b.as_addr(), 0);
  if (kb.as_int() < ka.as_int()) std::swap(a, b);
  Value l = ex.nth(a.as_addr(), 1), r = ex.nth(a.as_addr(), 2);
  std::uint64_t sub = 0;
  Value m = ex.call([] { return call("meld_time", var("d") - nat(1)); }, [&] { return meld(ex, r, b, sub); });
  ex.upd(a.as_addr(), 1, m);
  ex.upd(a.as_addr(), 2, l);
  depth = sub + 1;
  f.set("d", I(depth));
  return ex.ret(a);
}

inline Value skew_insert(Exec& ex, const Value& root, const Int& x) {
  auto f = ex.frame("sh_insert_time", {{"d", 0}});
  Value n = ex.array_of_list({Value(x), Value(), Value()}, 4);
  std::uint64_t d = 0;
  Value r = ex.call([] { return call("meld_time", var("d")); }, [&] { return meld(ex, root, n, d); });
  f.set("d", I(d));
  return r;
}

/// Returns [min, new root]; fails on the empty heap.
inline std::pair<Int, Value> skew_del_min(Exec& ex, const Value& root) {
  auto f = ex.frame("sh_del_min_time", {{"d", 0}});
  if (tree::leaf(root)) ex.machine().fail("del_min on empty heap");
  Value k = ex.nth(root.as_addr(), 0), l = ex.nth(root.as_addr(), 1), r = ex.nth(root.as_addr(), 2);
  std::uint64_t d = 0;
  Value m = ex.call([] { return call("meld_time", var("d")); }, [&] { return meld(ex, l, r, d); });
  f.set("d", I(d));
  ValueList out = ex.ret(Value(ValueList{k, m})).as_list();
  return {out[0].as_int(), out[1]};
}

// ---------------------------------------------------------------- splay tree

/// Recursive splay: every recursive call handles two levels (zig-zig or
/// zig-zag); a single rotation finishes when the target is one level down.
/// `depth` receives the number of recursive calls.
inline Value splay(Exec& ex, const Int& x, const Value& t, std::uint64_t& depth) {
  auto f = ex.frame("splay_time", {{"d", 0}});
  depth = 0;
  if (tree::leaf(t)) return ex.ret(t);
  Addr T = t.as_addr();
  Int a = ex.nth(T, 0).as_int();
  if (x == a) return ex.ret(t);
  std::uint64_t near = x < a ? 1 : 2, far = 3 - near;
  Value A = ex.nth(T, near);
  if (tree::leaf(A)) return ex.ret(t);
  Addr AA = A.as_addr();
  Int c = ex.nth(AA, 0).as_int();
  auto rotate = [&] {
    // Single rotation bringing A above t.
    ex.upd(T, near, ex.nth(AA, far));
    ex.upd(AA, far, t);
    return ex.ret(A);
  };
  if (x == c) return rotate();
  bool same_side = near == 1 ? x < c : x > c;
  std::uint64_t inner = same_side ? near : far;
  Value C = ex.nth(AA, inner);
  if (tree::leaf(C)) {
    if (same_side) {
      Value D = ex.nth(AA, far);
      ex.upd(T, near, D);
    } else {
      ex.upd(T, near, C);
    }
    ex.upd(AA, far, t);
    return ex.ret(A);
  }
  std::uint64_t sub = 0;
  Value S = ex.call([] { return call("splay_time", var("d") - nat(1)); }, [&] { return splay(ex, x, C, sub); });
  Addr SS = S.as_addr();
  if (same_side) {
    // zig-zig: S takes A as its far child, A takes t as its far child.
    Value F = ex.nth(SS, far), D = ex.nth(AA, far);
    ex.upd(AA, near, F);
    ex.upd(AA, far, t);
    ex.upd(T, near, D);
    ex.upd(SS, far, A);
  } else {
    // zig-zag: S takes A and t as children.
    Value E = ex.nth(SS, near), F = ex.nth(SS, far);
    ex.upd(AA, far, E);
    ex.upd(T, near, F);
    ex.upd(SS, near, A);
    ex.upd(SS, far, t);
  }
  depth = sub + 1;
  f.set("d", I(depth));
  return ex.ret(S);
}

inline Value splay_insert(Exec& ex, const Value& root, const Int& x) {
  auto f = ex.frame("splay_insert_time", {{"d", 0}});
  if (tree::leaf(root)) return ex.ret(ex.array_of_list({Value(x), Value(), Value()}, 4));
  std::uint64_t d = 0;
  Value S = ex.call([] { return call("splay_time", var("d")); }, [&] { return splay(ex, x, root, d); });
  f.set("d", I(d));
  Addr SS = S.as_addr();
  Int a = ex.nth(SS, 0).as_int();
  if (x == a) return ex.ret(S);
  if (x < a) {
    Value l = ex.nth(SS, 1);
    ex.upd(SS, 1, Value());
    return ex.ret(ex.array_of_list({Value(x), l, S}, 4));
  }
  Value r = ex.nth(SS, 2);
  ex.upd(SS, 2, Value());
  return ex.ret(ex.array_of_list({Value(x), S, r}, 4));
}

/// Returns [found, new root].
inline std::pair<bool, Value> splay_lookup(Exec& ex, const Value& root, const Int& x) {
  auto f = ex.frame("splay_lookup_time", {{"d", 0}});
  if (tree::leaf(root)) {
    ex.ret(Value(false));
    return {false, root};
  }
  std::uint64_t d = 0;
  Value S = ex.call([] { return call("splay_time", var("d")); }, [&] { return splay(ex, x, root, d); });
  f.set("d", I(d));
  bool found = ex.nth(S.as_addr(), 0).as_int() == x;
  ex.ret(Value(ValueList{Value(found), S}));
  return {found, S};
}

}  // namespace timecredit::algo
