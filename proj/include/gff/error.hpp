#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gff {

enum class ErrorCode {
  invalid_margin,
  precondition,
  too_small_lattice,
  dense_cap_exceeded,
  factorization_failure,
  degenerate_box,
  domain_error,
  identity_violation,
  insufficient_sizes,
  no_accepted_samples,
  config_invalid,
  io_error,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace gff
