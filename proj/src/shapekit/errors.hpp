#pragma once

#include <stdexcept>
#include <string>

namespace shapekit {

enum class ErrorCode {
  invalid_input,
  template_mismatch,
  degenerate_configuration,
  insufficient_sample,
  singular_regressor,
  degenerate_labels,
  parse_error,
  io_error,
  version_mismatch,
  integrity_error,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace shapekit
