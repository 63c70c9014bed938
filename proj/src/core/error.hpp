#pragma once

#include <stdexcept>
#include <string>

namespace deynet {

enum class ErrorKind {
  Param,        // invalid argument or config value
  Format,       // malformed file contents
  Shape,        // dimension mismatch
  Data,         // empty or inconsistent dataset
  Training,     // non-finite loss / divergence
  Io,           // filesystem failure
  Consistency,  // internal contract violated by caller-supplied state
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace deynet
