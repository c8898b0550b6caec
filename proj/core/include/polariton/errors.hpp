#pragma once

#include <stdexcept>
#include <string>

namespace polariton {

enum class ConfigErrc {
  parse_error,
  missing_field,
  unknown_key,
  type_mismatch,
  non_positive,
  confinement_below_unity,
  lattice_not_subwavelength,
  invalid_filling,
  invalid_argument,
};

enum class NumericalErrc {
  invalid_grid,
  cfl_violation,
  under_resolved_regularization,
  step_size_divergence,
  support_left_grid,
  insufficient_support,
  not_transmitted,
  empty_input,
};

const char* to_string(ConfigErrc code) noexcept;
const char* to_string(NumericalErrc code) noexcept;

/// Invalid user input: malformed documents, out-of-domain physical values.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(ConfigErrc code, std::string key, const std::string& what)
      : std::invalid_argument(what), code_(code), key_(std::move(key)) {}

  ConfigErrc code() const noexcept { return code_; }
  /// Offending field name, empty when not tied to a single field.
  const std::string& key() const noexcept { return key_; }

 private:
  ConfigErrc code_;
  std::string key_;
};

/// A numerical constraint (CFL, resolution, support) was violated.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(NumericalErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  NumericalErrc code() const noexcept { return code_; }

 private:
  NumericalErrc code_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polariton
