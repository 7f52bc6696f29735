// Licensed under the Apache License 2.0 (see LICENSE file).

#pragma once

#include <stdexcept>
#include <string>

namespace mstvtp {

enum class ErrorCode {
  InvalidArgument = 1,
  Dimension = 2,
  Domain = 3,
  NonFinite = 4,
  Degenerate = 5,
  NonConvergence = 6,
  Io = 7,
  Internal = 8,
};

/// Library-wide exception carrying a coarse error category. The C API maps
/// the category to a status code at the boundary.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace mstvtp
