#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace polariton {

/// Physical inputs of one experiment, all in SI units. Member names are the
/// JSON keys of the configuration document.
struct ExperimentConfig {
  double wavelength_lambda{};       // m
  double beam_area_A{};             // m^2
  double lattice_constant_a{};      // m
  double confinement_f{1.0};        // a / l0
  long atoms_per_site_N{1};

  // s-wave scattering lengths (m); sign encodes repulsive / attractive.
  double scattering_length_a_pm{};  // q+ with q-
  double scattering_length_a_pp{};
  double scattering_length_a_mm{};
  double scattering_length_a_g{};   // ground with ground
  double scattering_length_a_gp{};  // ground with q+
  double scattering_length_a_gm{};  // ground with q-

  double atom_mass_m{};             // kg
  double control_rabi_Omega0{};     // rad / s
  double dipole_mu{};               // C m
  double probe_omega{};             // rad / s

  // Only needed for the detuning / resonance check.
  std::optional<double> control_omega_c;
  std::optional<double> wavenumber_k;
  std::optional<double> wavenumber_k_c;
  std::optional<double> omega_e_plus;
  std::optional<double> omega_e_minus;
  std::optional<double> omega_q_plus;
  std::optional<double> omega_q_minus;

  /// Average atom density n = N / a^3.
  double density() const;
};

/// Throws ConfigError on the first violated invariant.
void validate(const ExperimentConfig& config);

/// Reads the experiment keys from `doc`. Keys listed in `ignored_keys` are
/// skipped (they belong to another section of the same document); any other
/// unknown key is an error. The result is validated.
ExperimentConfig config_from_json(const nlohmann::json& doc,
                                  const std::vector<std::string>& ignored_keys = {});
ExperimentConfig parse_config(std::string_view text);
nlohmann::json to_json(const ExperimentConfig& config);

/// u = 4 pi a_s hbar / m, in m^3 / s.
double collision_strength(double scattering_length, double mass);

/// v_rec = hbar omega / (m c).
double recoil_velocity(double probe_omega, double mass);

struct Detunings {
  double e_plus{};
  double e_minus{};
  double q_plus{};
  double q_minus{};
  // Mean-field shifts u_{g+-} n f^3 that the q detunings must cancel.
  double q_shift_plus{};
  double q_shift_minus{};
  double tolerance{};
  bool resonant{};
  std::vector<std::string> warnings;
};

/// Evaluates the four detunings and checks the resonance conditions
/// Delta_e = 0 and Delta_q + u_g n f^3 = 0 within `tolerance` (rad/s,
/// default 1e-6 |Omega0|). Off-resonance is reported as a warning only.
Detunings detunings(const ExperimentConfig& config,
                    std::optional<double> tolerance = std::nullopt);

}  // namespace polariton
