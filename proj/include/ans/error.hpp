#pragma once

#include <stdexcept>
#include <string>

namespace ans {

// Mirrors the numeric codes of the C API (ans_status in ans.h).
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kParse = 3,
  kLabel = 4,
  kIo = 5,
  kFormatVersion = 6,
  kTruncated = 7,
  kCorrupt = 8,
  kDivergence = 9,
  kConvergence = 10,
  kEmpty = 11,
};

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

}  // namespace ans
