#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "timecredit/heap.hpp"
#include "timecredit/value.hpp"

namespace timecredit {

enum class Prim : std::uint8_t {
  Return,
  RefNew,
  RefRead,
  RefWrite,
  ArrayLen,
  ArrayNth,
  ArrayUpd,
  ArrayNew,
  ArrayOfList,
  ArrayToList,
  ATake,
  ADrop,
};

inline std::string_view prim_name(Prim p) {
  switch (p) {
    case Prim::Return: return "return";
    case Prim::RefNew: return "ref_new";
    case Prim::RefRead: return "ref_read";
    case Prim::RefWrite: return "ref_write";
    case Prim::ArrayLen: return "array_len";
    case Prim::ArrayNth: return "array_nth";
    case Prim::ArrayUpd: return "array_upd";
    case Prim::ArrayNew: return "array_new";
    case Prim::ArrayOfList: return "array_of_list";
    case Prim::ArrayToList: return "array_to_list";
    case Prim::ATake: return "atake";
    case Prim::ADrop: return "adrop";
  }
  return "?";
}

struct TraceEntry {
  Prim prim;
  std::uint64_t cost;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

/// Executes primitives against an owned heap and counts their cost.
///
/// Cost table: return, reference and per-cell array commands cost 1;
/// whole-array commands touching n cells cost n + 1. Host-level control
/// flow (branching, recursion, arithmetic on values) is free.
class Machine {
 public:
  explicit Machine(Heap h = {}, bool record_trace = false)
      : heap_(std::move(h)), tracing_(record_trace) {}

  Value ret(Value v) {
    charge(Prim::Return, 1);
    return v;
  }

  Addr ref_new(Value v) {
    charge(Prim::RefNew, 1);
    return heap_.alloc_ref(std::move(v));
  }
  Value ref_read(Addr a) {
    const Value& v = heap_.ref(a);
    charge(Prim::RefRead, 1);
    return v;
  }
  void ref_write(Addr a, Value v) {
    Value& cell = heap_.ref(a);
    charge(Prim::RefWrite, 1);
    cell = std::move(v);
  }

  std::uint64_t array_len(Addr a) {
    std::uint64_t n = heap_.array(a).size();
    charge(Prim::ArrayLen, 1);
    return n;
  }
  Value array_nth(Addr a, std::uint64_t i) {
    const ValueList& xs = heap_.array(a);
    if (i >= xs.size()) throw Failure("array index out of bounds");
    charge(Prim::ArrayNth, 1);
    return xs[i];
  }
  void array_upd(Addr a, std::uint64_t i, Value v) {
    ValueList& xs = heap_.array(a);
    if (i >= xs.size()) throw Failure("array index out of bounds");
    charge(Prim::ArrayUpd, 1);
    xs[i] = std::move(v);
  }

  Addr array_new(std::uint64_t n, const Value& x) {
    charge(Prim::ArrayNew, n + 1);
    return heap_.alloc_array(ValueList(n, x));
  }
  Addr array_of_list(ValueList xs) {
    charge(Prim::ArrayOfList, xs.size() + 1);
    return heap_.alloc_array(std::move(xs));
  }
  ValueList array_to_list(Addr a) {
    const ValueList& xs = heap_.array(a);
    charge(Prim::ArrayToList, xs.size() + 1);
    return xs;
  }
  Addr atake(std::uint64_t k, Addr a) {
    const ValueList& xs = heap_.array(a);
    if (k > xs.size()) throw Failure("atake beyond array length");
    ValueList part(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(k));
    charge(Prim::ATake, k + 1);
    return heap_.alloc_array(std::move(part));
  }
  Addr adrop(std::uint64_t k, Addr a) {
    const ValueList& xs = heap_.array(a);
    if (k > xs.size()) throw Failure("adrop beyond array length");
    ValueList part(xs.begin() + static_cast<std::ptrdiff_t>(k), xs.end());
    charge(Prim::ADrop, part.size() + 1);
    return heap_.alloc_array(std::move(part));
  }

  [[noreturn]] void fail(const std::string& why) { throw Failure(why); }

  std::uint64_t cost() const { return cost_; }
  const Heap& heap() const { return heap_; }
  Heap release_heap() && { return std::move(heap_); }
  const std::vector<TraceEntry>& trace() const { return trace_; }

 private:
  void charge(Prim p, std::uint64_t c) {
    cost_ += c;
    if (tracing_) trace_.push_back({p, c});
  }

  Heap heap_;
  std::uint64_t cost_ = 0;
  bool tracing_ = false;
  std::vector<TraceEntry> trace_;
};

}  // namespace timecredit
