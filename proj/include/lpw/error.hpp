#pragma once

#include <stdexcept>
#include <string>

namespace lpw {

enum class Errc {
  resolution_too_coarse,
  level_out_of_range,
  empty_interval,
  invalid_family,
  resolution_mismatch,
  dimension_mismatch,
  bad_exponent,
  bad_mode,
  bad_threshold,
  bad_regime,
  unknown_policy,
  infeasible_family,
};

const char* to_string(Errc code) noexcept;

// All precondition failures in the library are reported through this type.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace lpw
