#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <vector>

#include "timecredit/value.hpp"

namespace timecredit {

/// Total heap: reference cells and arrays keyed by address id, plus a
/// monotone allocation counter. Addresses are never reused.
class Heap {
 public:
  Heap() = default;

  std::uint64_t next_addr() const { return next_; }

  Addr alloc_ref(Value v) {
    Addr a{next_++, AddrKind::Ref};
    refs_.emplace(a.id, std::move(v));
    return a;
  }

  Addr alloc_array(ValueList xs) {
    Addr a{next_++, AddrKind::Array};
    arrays_.emplace(a.id, std::move(xs));
    return a;
  }

  bool has_ref(Addr a) const { return a.kind == AddrKind::Ref && refs_.count(a.id) != 0; }
  bool has_array(Addr a) const { return a.kind == AddrKind::Array && arrays_.count(a.id) != 0; }
  bool allocated(std::uint64_t id) const { return refs_.count(id) || arrays_.count(id); }

  const Value& ref(Addr a) const {
    if (!has_ref(a)) throw Failure("dangling reference");
    return refs_.at(a.id);
  }
  Value& ref(Addr a) {
    if (!has_ref(a)) throw Failure("dangling reference");
    return refs_.at(a.id);
  }
  const ValueList& array(Addr a) const {
    if (!has_array(a)) throw Failure("dangling array");
    return arrays_.at(a.id);
  }
  ValueList& array(Addr a) {
    if (!has_array(a)) throw Failure("dangling array");
    return arrays_.at(a.id);
  }

  /// Address record for an allocated id, whichever sort it has.
  std::optional<Addr> lookup(std::uint64_t id) const {
    if (refs_.count(id)) return Addr{id, AddrKind::Ref};
    if (arrays_.count(id)) return Addr{id, AddrKind::Array};
    return std::nullopt;
  }

  const std::map<std::uint64_t, Value>& refs() const { return refs_; }
  const std::map<std::uint64_t, ValueList>& arrays() const { return arrays_; }

  std::set<std::uint64_t> domain() const {
    std::set<std::uint64_t> out;
    for (const auto& [id, _] : refs_) out.insert(id);
    for (const auto& [id, _] : arrays_) out.insert(id);
    return out;
  }

  /// Both domains are disjoint and strictly below the allocation counter.
  bool well_formed() const {
    for (const auto& [id, _] : refs_) {
      if (id >= next_ || arrays_.count(id)) return false;
    }
    for (const auto& [id, _] : arrays_) {
      if (id >= next_) return false;
    }
    return true;
  }

  friend bool operator==(const Heap&, const Heap&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Heap& h) {
    os << "heap(next=" << h.next_ << ")";
    for (const auto& [id, v] : h.refs_) os << " r" << id << "=" << v;
    for (const auto& [id, xs] : h.arrays_) os << " a" << id << "=" << Value(xs);
    return os;
  }

 private:
  std::map<std::uint64_t, Value> refs_;
  std::map<std::uint64_t, ValueList> arrays_;
  std::uint64_t next_ = 0;
};

}  // namespace timecredit
