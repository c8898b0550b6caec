#include "polariton/errors.hpp"

namespace polariton {

const char* to_string(ConfigErrc code) noexcept {
  switch (code) {
    case ConfigErrc::parse_error: return "parse_error";
    case ConfigErrc::missing_field: return "missing_field";
    case ConfigErrc::unknown_key: return "unknown_key";
    case ConfigErrc::type_mismatch: return "type_mismatch";
    case ConfigErrc::non_positive: return "non_positive";
    case ConfigErrc::confinement_below_unity: return "confinement_below_unity";
    case ConfigErrc::lattice_not_subwavelength: return "lattice_not_subwavelength";
    case ConfigErrc::invalid_filling: return "invalid_filling";
    case ConfigErrc::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

const char* to_string(NumericalErrc code) noexcept {
  switch (code) {
    case NumericalErrc::invalid_grid: return "invalid_grid";
    case NumericalErrc::cfl_violation: return "cfl_violation";
    case NumericalErrc::under_resolved_regularization: return "under_resolved_regularization";
    case NumericalErrc::step_size_divergence: return "step_size_divergence";
    case NumericalErrc::support_left_grid: return "support_left_grid";
    case NumericalErrc::insufficient_support: return "insufficient_support";
    case NumericalErrc::not_transmitted: return "not_transmitted";
    case NumericalErrc::empty_input: return "empty_input";
  }
  return "unknown";
}

}  // namespace polariton
