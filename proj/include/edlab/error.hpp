#pragma once

#include <stdexcept>
#include <string>

namespace edlab {

enum class ErrorCode {
  invalid_argument = 1,
  validation = 2,
  numerical = 3,
  io = 4,
  node = 5,
};

// Single exception type for the library; the C API maps `code()` onto its
// status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace edlab
