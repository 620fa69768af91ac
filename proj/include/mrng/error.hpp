#pragma once

#include <stdexcept>
#include <string>

namespace mrng {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  duplicate_points,
  io_error,
  format_error,
  checksum_mismatch,
  not_local_minimum,
  cap_exceeded,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code) noexcept;

}  // namespace mrng
