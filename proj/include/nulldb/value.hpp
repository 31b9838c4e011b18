#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "nulldb/error.hpp"

namespace nulldb {

using NullId = std::uint32_t;

// A cell of a database tuple: either a finite real constant or a marked
// null.  Marked nulls with the same id denote the same unknown quantity,
// so equality on nulls is by id.
class Value {
public:
  static Value real(double x) {
    if (!std::isfinite(x)) fail(ErrKind::Type, "non-finite real value");
    Value v;
    v.is_null_ = false;
    v.real_ = x;
    return v;
  }
  static Value null(NullId id) {
    Value v;
    v.is_null_ = true;
    v.id_ = id;
    return v;
  }

  bool is_null() const { return is_null_; }
  bool is_real() const { return !is_null_; }
  double as_real() const {
    if (is_null_) fail(ErrKind::NullComparison, "null used where a real is required");
    return real_;
  }
  NullId null_id() const {
    if (!is_null_) fail(ErrKind::Internal, "null_id on a real value");
    return id_;
  }

  friend bool operator==(const Value& a, const Value& b) {
    if (a.is_null_ != b.is_null_) return false;
    return a.is_null_ ? a.id_ == b.id_ : a.real_ == b.real_;
  }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
  // Total order used for canonical bag iteration: reals first by magnitude,
  // then nulls by id.
  friend bool operator<(const Value& a, const Value& b) {
    if (a.is_null_ != b.is_null_) return !a.is_null_;
    return a.is_null_ ? a.id_ < b.id_ : a.real_ < b.real_;
  }

  std::string str() const {
    if (is_null_) return "n" + std::to_string(id_);
    return std::to_string(real_);
  }

private:
  Value() = default;
  bool is_null_ = false;
  double real_ = 0.0;
  NullId id_ = 0;
};

using Tuple = std::vector<Value>;

inline bool tuple_less(const Tuple& a, const Tuple& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct TupleLess {
  bool operator()(const Tuple& a, const Tuple& b) const { return tuple_less(a, b); }
};

} // namespace nulldb
