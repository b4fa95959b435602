#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "timecredit/algorithms/structures.hpp"
#include "timecredit/amortized.hpp"

namespace timecredit::algo {

struct DynState {
  Heap heap;
  DynArray d;
};

struct TreeState {
  Heap heap;
  Value root;
};

inline DynState dyn_state() {
  DynState s;
  s.d = dyn_empty(s.heap);
  return s;
}

/// Runs f against the state's heap and returns the interpreter cost. The
/// heap is handed back even if f fails.
template <class S, class F>
std::uint64_t run_on(S& s, F&& f, ObligationLog* log = nullptr) {
  Machine m(std::move(s.heap));
  Exec ex(m, log);
  try {
    f(ex);
  } catch (...) {
    s.heap = std::move(m).release_heap();
    throw;
  }
  std::uint64_t c = m.cost();
  s.heap = std::move(m).release_heap();
  return c;
}

/// Smallest k with 2^k >= x^c (x >= 1, x^c below 2^127).
inline unsigned ceil_clog2(std::uint64_t x, unsigned c) {
  unsigned __int128 v = 1;
  for (unsigned i = 0; i < c; ++i) v *= x;
  unsigned k = 0;
  while ((static_cast<unsigned __int128>(1) << k) < v) ++k;
  return k;
}

/// Shape of the logarithmic amortized claims: ceil(3 log2 n) + 2.
inline Int log_shape(std::uint64_t n) { return Int(ceil_clog2(std::max<std::uint64_t>(n, 1), 3) + 2); }
inline Int unit_shape(std::uint64_t) { return 1; }

// Potentials: w * max(0, 2 len - cap), w * #right-heavy nodes and
// w * sum ceil(3 log2 size1). A doubling allocates 2 cap cells (cost >= 2 cap
// + 1) while the unweighted array potential releases only cap, so the array
// potential needs a weight; the tree potentials work unweighted.
constexpr unsigned kDynPhiWeight = 4;
constexpr unsigned kSkewPhiWeight = 3;
constexpr unsigned kSplayPhiWeight = 1;

inline Int dyn_potential(const DynState& s, unsigned w = kDynPhiWeight) {
  std::uint64_t cap = s.heap.array(s.d.arr).size();
  std::uint64_t twice = 2 * s.d.len;
  return twice > cap ? Int(w) * Int(twice - cap) : Int(0);
}

inline Int skew_potential(const TreeState& s, unsigned w = kSkewPhiWeight) {
  std::uint64_t heavy = 0;
  tree::fold_sizes(s.heap, s.root, [&](const Value&, std::uint64_t l, std::uint64_t r) { heavy += r > l; });
  return Int(w) * Int(heavy);
}

inline Int splay_potential(const TreeState& s, unsigned w = kSplayPhiWeight) {
  std::uint64_t sum = 0;
  tree::fold_sizes(s.heap, s.root,
                   [&](const Value&, std::uint64_t l, std::uint64_t r) { sum += ceil_clog2(l + r + 2, 3); });
  return Int(w) * Int(sum);
}

inline AmortizedScheme<DynState> dynarray_scheme(unsigned K, unsigned phi_weight = kDynPhiWeight) {
  AmortizedScheme<DynState> s;
  s.name = "dynarray";
  s.potential = [phi_weight](const DynState& x) { return dyn_potential(x, phi_weight); };
  s.precondition = [](const DynState& x) { return x.d.len <= x.heap.array(x.d.arr).size(); };
  auto size = [](const DynState& x) { return x.d.len; };
  auto fat = [K](std::uint64_t) { return Int(K); };
  s.ops.push_back({"push", [](DynState& x, const Value& v) { return run_on(x, [&](Exec& ex) { dyn_push(ex, x.d, v); }); },
                   size, fat});
  s.ops.push_back({"get",
                   [](DynState& x, const Value& i) { return run_on(x, [&](Exec& ex) { dyn_get(ex, x.d, i.as_index()); }); },
                   size, fat});
  s.ops.push_back({"len", [](DynState& x, const Value&) { return run_on(x, [&](Exec& ex) { dyn_len(ex, x.d); }); },
                   size, fat});
  return s;
}

inline std::uint64_t size1(const TreeState& x) { return tree::size(x.heap, x.root) + 1; }

inline AmortizedScheme<TreeState> skew_scheme(unsigned K, unsigned phi_weight = kSkewPhiWeight) {
  AmortizedScheme<TreeState> s;
  s.name = "skew_heap";
  s.potential = [phi_weight](const TreeState& x) { return skew_potential(x, phi_weight); };
  s.precondition = [](const TreeState& x) { return tree::is_heap_ordered(x.heap, x.root); };
  auto fat = [K](std::uint64_t n) { return Int(K) * log_shape(n); };
  s.ops.push_back({"insert",
                   [](TreeState& x, const Value& v) {
                     return run_on(x, [&](Exec& ex) { x.root = skew_insert(ex, x.root, v.as_int()); });
                   },
                   size1, fat});
  s.ops.push_back({"del_min",
                   [](TreeState& x, const Value&) {
                     return run_on(x, [&](Exec& ex) { x.root = skew_del_min(ex, x.root).second; });
                   },
                   size1, fat});
  return s;
}

inline AmortizedScheme<TreeState> splay_scheme(unsigned K, unsigned phi_weight = kSplayPhiWeight) {
  AmortizedScheme<TreeState> s;
  s.name = "splay";
  s.potential = [phi_weight](const TreeState& x) { return splay_potential(x, phi_weight); };
  s.precondition = [](const TreeState& x) { return tree::is_bst(x.heap, x.root); };
  auto fat = [K](std::uint64_t n) { return Int(K) * log_shape(n); };
  s.ops.push_back({"splay",
                   [](TreeState& x, const Value& v) {
                     return run_on(x, [&](Exec& ex) {
                       std::uint64_t d = 0;
                       x.root = splay(ex, v.as_int(), x.root, d);
                     });
                   },
                   size1, fat});
  s.ops.push_back({"insert",
                   [](TreeState& x, const Value& v) {
                     return run_on(x, [&](Exec& ex) { x.root = splay_insert(ex, x.root, v.as_int()); });
                   },
                   size1, fat});
  s.ops.push_back({"lookup",
                   [](TreeState& x, const Value& v) {
                     return run_on(x, [&](Exec& ex) { x.root = splay_lookup(ex, x.root, v.as_int()).second; });
                   },
                   size1, fat});
  return s;
}

// Random operation sequences, deterministic in the seed.

inline std::vector<OpCall> dyn_ops(std::size_t count, std::uint64_t seed, bool pushes_only = false) {
  std::mt19937_64 rng(seed);
  std::vector<OpCall> ops;
  std::uint64_t len = 0;
  for (std::size_t i = 0; i < count; ++i) {
    unsigned r = rng() % 10;
    if (pushes_only || len == 0 || r < 8) {
      ops.push_back({"push", Value(static_cast<long long>(rng() % 1000))});
      ++len;
    } else if (r == 8) {
      ops.push_back({"get", Value(rng() % len)});
    } else {
      ops.push_back({"len", Value()});
    }
  }
  return ops;
}

inline std::vector<OpCall> skew_ops(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<OpCall> ops;
  std::uint64_t size = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (size == 0 || rng() % 5 < 3) {
      ops.push_back({"insert", Value(static_cast<long long>(rng() % 100000))});
      ++size;
    } else {
      ops.push_back({"del_min", Value()});
      --size;
    }
  }
  return ops;
}

inline std::vector<OpCall> splay_ops(std::size_t count, std::uint64_t seed, long long key_range = 2000) {
  std::mt19937_64 rng(seed);
  std::vector<OpCall> ops;
  for (std::size_t i = 0; i < count; ++i) {
    unsigned r = rng() % 10;
    Value k(static_cast<long long>(rng() % key_range));
    ops.push_back({r < 5 ? "insert" : r < 9 ? "lookup" : "splay", k});
  }
  return ops;
}

/// Sorted-order inserts build a path; repeated lookups of its deep end are
/// the classic expensive case for splaying.
inline std::vector<OpCall> splay_adversarial_ops(std::size_t count) {
  std::vector<OpCall> ops;
  std::size_t half = count / 2;
  for (std::size_t i = 0; i < half; ++i) ops.push_back({"insert", Value(static_cast<long long>(i))});
  for (std::size_t i = half; i < count; ++i) ops.push_back({"lookup", Value(static_cast<long long>((i * 7) % half))});
  return ops;
}

}  // namespace timecredit::algo
