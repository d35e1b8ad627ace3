#pragma once

#include <stdexcept>
#include <string>

namespace sgpad {

enum class ErrorCode {
  InvalidArgument = 1,
  Dimension = 2,
  Io = 3,
  Parse = 4,
  Precondition = 5,
  Numeric = 6,
  NotFound = 7,
};

// Every failure raised by the library carries one of the codes above so the
// C boundary can map it without string matching.
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

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace sgpad
