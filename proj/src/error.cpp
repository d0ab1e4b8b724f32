#include "lpw/error.hpp"

namespace lpw {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::resolution_too_coarse: return "resolution too coarse";
    case Errc::level_out_of_range: return "level out of range";
    case Errc::empty_interval: return "empty interval";
    case Errc::invalid_family: return "invalid interval family";
    case Errc::resolution_mismatch: return "resolution mismatch";
    case Errc::dimension_mismatch: return "dimension mismatch";
    case Errc::bad_exponent: return "bad exponent";
    case Errc::bad_mode: return "bad mode";
    case Errc::bad_threshold: return "bad threshold";
    case Errc::bad_regime: return "bad regime";
    case Errc::unknown_policy: return "unknown policy";
    case Errc::infeasible_family: return "infeasible family";
  }
  return "unknown error";
}

}  // namespace lpw
