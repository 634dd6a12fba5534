#pragma once

#include <stdexcept>
#include <string>

namespace dtcae {

/// Broad failure classes. The CLI maps each to a process exit code.
enum class ErrorKind {
  Shape,        // dimension mismatch between operands
  Input,        // malformed numeric input (e.g. non-symmetric Gram)
  Singular,     // factorization failed
  Parse,        // dataset/params file could not be parsed
  Schema,       // parsed file disagrees with its header
  Validation,   // value violates a data invariant
  Size,         // too few points for the requested operation
  Window,       // instance set shorter than the window
  Config,       // invalid hyperparameter or option
  Data,         // empty pool or missing labels at solve time
  Io,           // filesystem failure
  Divergence,   // non-finite objective during training
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace dtcae
