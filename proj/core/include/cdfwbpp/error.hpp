#pragma once

#include <stdexcept>
#include <string>

namespace cdfwbpp {

enum class ErrorKind {
  kParse,
  kContextMismatch,
  kArity,
  kMissingImage,
  kUnknownLetter,
  kDimensionMismatch,
  kPrecondition,
  kNotWellPosed,
  kNotComposable,
  kConstraint,
  kResourceLimit,
  kInternal,
};

const char* to_string(ErrorKind kind);

// All library failures are reported through this exception; the kind decides
// how the command-line front end maps it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cdfwbpp
