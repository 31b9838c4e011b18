#pragma once

#include <stdexcept>
#include <string>

namespace nulldb {

// Every failure the library can signal.  The C API maps these onto a
// smaller set of status codes; the kind is preserved for diagnostics.
enum class ErrKind {
  Parse,               // bad query/expression/JSON text
  Type,                // arity or schema violation
  Config,              // bad run parameters (epsilon out of range, ...)
  Io,                  // file not readable, ...
  MissingNull,         // valuation lacks a binding for a null
  UnboundVariable,     // expression references an attribute with no binding
  DivByZero,           // denominator evaluated to exactly 0.0
  NullComparison,      // order comparison / arithmetic touched a null in naive mode
  Overflow,            // multiplicity arithmetic overflowed
  BlowupLimit,         // conditional-world split exceeded the cap
  CellLimit,           // cell decomposition exceeded the cap
  NotCellDecomposable, // exact oracle cannot handle the query shape
  TooManyNulls,        // grid oracle null budget exceeded
  NoBranch,            // no world branch holds under the valuation
  MultiBranch,         // several world branches hold under the valuation
  SampleAbort,         // a sampling run failed and skipping was not allowed
  Internal,
};

class Error : public std::runtime_error {
public:
  Error(ErrKind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
  ErrKind kind() const { return kind_; }

private:
  ErrKind kind_;
};

[[noreturn]] inline void fail(ErrKind k, const std::string& msg) { throw Error(k, msg); }

inline const char* err_kind_name(ErrKind k) {
  switch (k) {
    case ErrKind::Parse: return "parse";
    case ErrKind::Type: return "type";
    case ErrKind::Config: return "config";
    case ErrKind::Io: return "io";
    case ErrKind::MissingNull: return "missing-null";
    case ErrKind::UnboundVariable: return "unbound-variable";
    case ErrKind::DivByZero: return "div-by-zero";
    case ErrKind::NullComparison: return "null-comparison";
    case ErrKind::Overflow: return "overflow";
    case ErrKind::BlowupLimit: return "blowup-limit";
    case ErrKind::CellLimit: return "cell-limit";
    case ErrKind::NotCellDecomposable: return "not-cell-decomposable";
    case ErrKind::TooManyNulls: return "too-many-nulls";
    case ErrKind::NoBranch: return "no-branch";
    case ErrKind::MultiBranch: return "multi-branch";
    case ErrKind::SampleAbort: return "sample-abort";
    case ErrKind::Internal: return "internal";
  }
  return "unknown";
}

} // namespace nulldb
