#include "polariton/dispersion.hpp"

#include <cmath>
#include <sstream>

#include "polariton/constants.hpp"
#include "polariton/errors.hpp"

namespace polariton {

MixingAngle MixingAngle::from_photonic_fraction(double cos2) {
  if (!(cos2 >= 0.0 && cos2 <= 1.0))
    throw ConfigError(ConfigErrc::invalid_argument, "theta",
                      "photonic fraction cos^2(theta) must lie in [0, 1]");
  return MixingAngle(cos2, 1.0 - cos2);
}

MixingAngle MixingAngle::from_radians(double theta) {
  if (!(theta >= 0.0 && theta <= constants::pi / 2))
    throw ConfigError(ConfigErrc::invalid_argument, "theta", "theta must lie in [0, pi/2]");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return MixingAngle(c * c, s * s);
}

double MixingAngle::radians() const {
  // atan2 keeps full relative precision at both ends of [0, pi/2].
  return std::atan2(std::sqrt(sin2_), std::sqrt(cos2_));
}

double group_velocity(const ExperimentConfig& config) {
  const double n = config.density();
  if (!(n > 0.0))
    throw ConfigError(ConfigErrc::non_positive, "atoms_per_site_N", "atom density must be > 0");
  if (!(std::abs(config.dipole_mu) > 0.0))
    throw ConfigError(ConfigErrc::non_positive, "dipole_mu", "dipole moment must be nonzero");
  if (!(config.probe_omega > 0.0))
    throw ConfigError(ConfigErrc::non_positive, "probe_omega", "probe_omega must be > 0");
  const double omega0 = config.control_rabi_Omega0;
  const double mu = config.dipole_mu;
  return 2.0 * constants::c * constants::hbar * omega0 * omega0 * constants::epsilon0 /
         (mu * mu * config.probe_omega * n);
}

bool within_slow_light_regime(double v_gr) noexcept {
  return v_gr / constants::c < slow_light_limit;
}

MixingAngle mixing_angle(double v_gr) {
  if (!(v_gr > 0.0 && v_gr <= constants::c))
    throw ConfigError(ConfigErrc::invalid_argument, "v_gr",
                      "group velocity must satisfy 0 < v_gr <= c");
  return MixingAngle::from_photonic_fraction(v_gr / constants::c);
}

NonlinearCoefficients nonlinear_coefficients(const ExperimentConfig& config, double v_rec) {
  if (!(config.beam_area_A > 0.0))
    throw ConfigError(ConfigErrc::non_positive, "beam_area_A", "beam area must be > 0");
  const double f = config.confinement_f;
  const double prefactor =
      2.0 * config.wavelength_lambda * v_rec * f * f * f / config.beam_area_A;
  return {prefactor * config.scattering_length_a_pp, prefactor * config.scattering_length_a_mm,
          prefactor * config.scattering_length_a_pm};
}

double EitMedium::collision_phase() const { return kappa_cross / (2.0 * v_gr); }

EitMedium make_medium(const ExperimentConfig& config) {
  return make_medium(config, group_velocity(config));
}

EitMedium make_medium(const ExperimentConfig& config, double v_gr) {
  EitMedium medium;
  medium.v_gr = v_gr;
  medium.theta = mixing_angle(v_gr);
  medium.v_rec = recoil_velocity(config.probe_omega, config.atom_mass_m);
  const auto kappa = nonlinear_coefficients(config, medium.v_rec);
  medium.kappa_self_plus = kappa.self_plus;
  medium.kappa_self_minus = kappa.self_minus;
  medium.kappa_cross = kappa.cross;
  medium.compression_ratio = v_gr / constants::c;
  if (!within_slow_light_regime(v_gr)) {
    std::ostringstream msg;
    msg << "v_gr / c = " << medium.compression_ratio << " exceeds " << slow_light_limit
        << "; the slow-light expressions assume v_gr << c";
    medium.warnings.push_back(msg.str());
  }
  return medium;
}

}  // namespace polariton
