#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mathprep {

enum class ErrorCode {
  InvalidArgument,
  Format,
  Schema,
  Conflict,
  Reference,
  Shape,
  Domain,
  Config,
  Contract,
  Dispatch,
  Generation,
  Simulation,
  Unsupported,
  Io,
  Version,
  Capacity,
  Backend,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers switch on code().
// details() carries auxiliary payload such as raw backend outputs.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::vector<std::string> details = {})
      : std::runtime_error(std::move(message)), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  std::vector<std::string> details_;
};

[[noreturn]] inline void fail(ErrorCode code, std::string message) {
  throw Error(code, std::move(message));
}

}  // namespace mathprep
