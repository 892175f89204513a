#pragma once

#include <stdexcept>
#include <string>

namespace conic_qm {

// Error categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kValidation,     // malformed input, failed type invariant
  kNormalization,  // e(x) <= 0 or a state that is not normalized
  kInvariance,     // outcome functional not invariant under the flow
  kUnsupported,    // operation needs a skew-adjoint generator
  kPrecondition,   // state not fixed by the flow, etc.
  kRange,          // matrix exponential squaring budget exceeded
  kParse,          // scenario file syntax / schema
  kInvariantFailure,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Exit code convention: 2 parse/validation, 3 numeric range, 4 invariant.
inline int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kRange:
      return 3;
    case ErrorKind::kPrecondition:
    case ErrorKind::kInvariantFailure:
      return 4;
    default:
      return 2;
  }
}

[[noreturn]] inline void Throw(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace conic_qm
