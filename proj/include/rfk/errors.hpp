#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rfk {

enum class ErrorCode {
  invalid_argument = 1,
  invalid_signature,
  singular_fiber,
  domain,
  convergence,
  pole,
  dirac_string,
  chart_boundary,
  degenerate_metric,
  numeric_overflow,
  fit_domain,
  path,
  scan,
  parse,
  not_applicable,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the library carries one of the codes above; the C
/// API maps them one-to-one onto rfk_status values.
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

}  // namespace rfk
