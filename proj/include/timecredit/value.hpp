#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace timecredit {

using Int = boost::multiprecision::cpp_int;

/// Raised by any primitive whose precondition does not hold. The interpreter
/// turns it into a Failure outcome; it never escapes `run`.
class Failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Unit {
  friend bool operator==(Unit, Unit) { return true; }
  friend auto operator<=>(Unit, Unit) = default;
};

enum class AddrKind : std::uint8_t { Ref, Array };

/// Opaque heap address. Programs obtain addresses only from allocation.
struct Addr {
  std::uint64_t id = 0;
  AddrKind kind = AddrKind::Ref;

  friend bool operator==(const Addr&, const Addr&) = default;
  friend auto operator<=>(const Addr&, const Addr&) = default;
};

class Value;
using ValueList = std::vector<Value>;

/// Value sort of heap programs. Lists only arise from whole-array reads
/// (array_to_list) and as existential witnesses.
class Value {
 public:
  using Storage = std::variant<Unit, bool, Int, Addr, ValueList>;

  Value() : v_(Unit{}) {}
  Value(Unit u) : v_(u) {}
  Value(bool b) : v_(b) {}
  Value(Int i) : v_(std::move(i)) {}
  Value(int i) : v_(Int(i)) {}
  Value(long i) : v_(Int(i)) {}
  Value(long long i) : v_(Int(i)) {}
  Value(unsigned i) : v_(Int(i)) {}
  Value(unsigned long i) : v_(Int(i)) {}
  Value(unsigned long long i) : v_(Int(i)) {}
  Value(Addr a) : v_(a) {}
  Value(ValueList xs) : v_(std::move(xs)) {}

  bool is_unit() const { return std::holds_alternative<Unit>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_int() const { return std::holds_alternative<Int>(v_); }
  bool is_addr() const { return std::holds_alternative<Addr>(v_); }
  bool is_list() const { return std::holds_alternative<ValueList>(v_); }

  bool as_bool() const { return get<bool>("boolean"); }
  const Int& as_int() const { return get<Int>("integer"); }
  Addr as_addr() const { return get<Addr>("address"); }
  const ValueList& as_list() const { return get<ValueList>("list"); }

  /// Integer as a machine index; fails on negative or oversized values.
  std::uint64_t as_index() const {
    const Int& i = as_int();
    if (i < 0 || i > Int(std::numeric_limits<std::uint64_t>::max())) {
      throw Failure("integer out of index range");
    }
    return i.convert_to<std::uint64_t>();
  }

  const Storage& storage() const { return v_; }

  friend bool operator==(const Value& a, const Value& b) { return a.v_ == b.v_; }
  friend bool operator<(const Value& a, const Value& b) { return a.v_ < b.v_; }

  std::string str() const {
    std::ostringstream os;
    os << *this;
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Value& v) {
    std::visit(
        [&os](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Unit>) {
            os << "()";
          } else if constexpr (std::is_same_v<T, bool>) {
            os << (x ? "true" : "false");
          } else if constexpr (std::is_same_v<T, Int>) {
            os << x;
          } else if constexpr (std::is_same_v<T, Addr>) {
            os << (x.kind == AddrKind::Ref ? "@r" : "@a") << x.id;
          } else {
            os << '[';
            for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
            os << ']';
          }
        },
        v.v_);
    return os;
  }

 private:
  template <class T>
  const T& get(const char* what) const {
    if (const T* p = std::get_if<T>(&v_)) return *p;
    throw Failure(std::string("value is not a ") + what);
  }

  Storage v_;
};

inline ValueList to_values(const std::vector<long long>& xs) {
  ValueList out;
  out.reserve(xs.size());
  for (long long x : xs) out.emplace_back(x);
  return out;
}

inline std::vector<long long> to_ints(const ValueList& xs) {
  std::vector<long long> out;
  out.reserve(xs.size());
  for (const Value& v : xs) out.push_back(v.as_int().convert_to<long long>());
  return out;
}

}  // namespace timecredit
