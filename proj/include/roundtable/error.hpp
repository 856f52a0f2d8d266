#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace rtb {

// Exception carrying a stable machine-readable code ("io_error",
// "dim_mismatch", ...) next to the human-readable message. The code is what
// callers and the C boundary dispatch on; the message is for people.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& message) {
  throw Error(std::move(code), message);
}

}  // namespace rtb
