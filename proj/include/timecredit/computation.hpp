#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "timecredit/machine.hpp"

namespace timecredit {

struct Success {
  Value value;
  Heap heap;
  std::uint64_t cost = 0;
};

/// Result of running a computation. Failure carries no heap: whatever the
/// program mutated before failing is discarded with the machine.
struct Outcome {
  std::optional<Success> success;
  std::string failure;
  std::vector<TraceEntry> trace;

  bool ok() const { return success.has_value(); }
  const Value& value() const { return success.value().value; }
  const Heap& heap() const { return success.value().heap; }
  std::uint64_t cost() const { return success.value().cost; }
};

/// A program over the cost machine. Bodies call machine primitives in
/// direct style; host-level control flow inside a body is free.
class Computation {
 public:
  using Body = std::function<Value(Machine&)>;

  Computation() : body_([](Machine&) { return Value(); }) {}
  explicit Computation(Body b) : body_(std::move(b)) {}

  Value operator()(Machine& m) const { return body_(m); }

 private:
  Body body_;
};

inline Outcome run(const Computation& c, const Heap& h, bool record_trace = false) {
  Machine m(h, record_trace);
  Outcome out;
  try {
    Value v = c(m);
    std::uint64_t cost = m.cost();
    out.trace = m.trace();
    out.success = Success{std::move(v), std::move(m).release_heap(), cost};
  } catch (const Failure& f) {
    out.failure = f.what();
    out.trace = m.trace();
  }
  return out;
}

inline Computation return_pure(Value v) {
  return Computation([v = std::move(v)](Machine& m) { return m.ret(v); });
}

inline Computation fail_with(std::string why) {
  return Computation([why = std::move(why)](Machine& m) -> Value { m.fail(why); });
}

inline Computation bind_seq(Computation c1, std::function<Computation(const Value&)> f) {
  return Computation([c1 = std::move(c1), f = std::move(f)](Machine& m) {
    Value v = c1(m);
    return f(v)(m);
  });
}

/// Sequencing that ignores the first result.
inline Computation then(Computation c1, Computation c2) {
  return bind_seq(std::move(c1), [c2 = std::move(c2)](const Value&) { return c2; });
}

inline Computation ref_new(Value v) {
  return Computation([v = std::move(v)](Machine& m) { return Value(m.ref_new(v)); });
}
inline Computation ref_read(Addr a) {
  return Computation([a](Machine& m) { return m.ref_read(a); });
}
inline Computation ref_write(Addr a, Value v) {
  return Computation([a, v = std::move(v)](Machine& m) {
    m.ref_write(a, v);
    return Value();
  });
}

inline Computation array_len(Addr a) {
  return Computation([a](Machine& m) { return Value(m.array_len(a)); });
}
inline Computation array_nth(Addr a, std::uint64_t i) {
  return Computation([a, i](Machine& m) { return m.array_nth(a, i); });
}
inline Computation array_upd(Addr a, std::uint64_t i, Value v) {
  return Computation([a, i, v = std::move(v)](Machine& m) {
    m.array_upd(a, i, v);
    return Value();
  });
}
inline Computation array_new(std::uint64_t n, Value x) {
  return Computation([n, x = std::move(x)](Machine& m) { return Value(m.array_new(n, x)); });
}
inline Computation array_of_list(ValueList xs) {
  return Computation([xs = std::move(xs)](Machine& m) { return Value(m.array_of_list(xs)); });
}
inline Computation array_to_list(Addr a) {
  return Computation([a](Machine& m) { return Value(m.array_to_list(a)); });
}
inline Computation atake(std::uint64_t k, Addr a) {
  return Computation([k, a](Machine& m) { return Value(m.atake(k, a)); });
}
inline Computation adrop(std::uint64_t k, Addr a) {
  return Computation([k, a](Machine& m) { return Value(m.adrop(k, a)); });
}

}  // namespace timecredit
