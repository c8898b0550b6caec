#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "polariton/constants.hpp"
#include "polariton/errors.hpp"
#include "polariton/params.hpp"

using namespace polariton;
using polariton::testing::reference_config;
using polariton::testing::rel_diff;

namespace {

ConfigErrc error_of(const ExperimentConfig& cfg) {
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    return e.code();
  }
  FAIL("config was accepted");
  return ConfigErrc::invalid_argument;
}

ConfigErrc parse_error_of(const nlohmann::json& doc) {
  try {
    config_from_json(doc);
  } catch (const ConfigError& e) {
    return e.code();
  }
  FAIL("document was accepted");
  return ConfigErrc::invalid_argument;
}

}  // namespace

TEST_CASE("collision strength") {
  const double m87 = 87.0 * constants::amu;
  CHECK(collision_strength(0.0, m87) == 0.0);
  CHECK(rel_diff(collision_strength(10e-9, m87), oracle::collision_strength_10nm_87amu) < 1e-12);
  CHECK(rel_diff(collision_strength(20e-9, m87), 2.0 * collision_strength(10e-9, m87)) < 1e-15);
  CHECK(rel_diff(collision_strength(10e-9, 2.0 * m87), 0.5 * collision_strength(10e-9, m87)) <
        1e-15);
  CHECK(collision_strength(-5e-9, m87) < 0.0);
  CHECK_THROWS_AS(collision_strength(1e-9, 0.0), ConfigError);
  CHECK_THROWS_AS(collision_strength(1e-9, -1.0), ConfigError);
}

TEST_CASE("recoil velocity") {
  const double m = oracle::atom_mass_for_1cm_per_s;
  const double w = oracle::probe_omega_800nm;
  CHECK(rel_diff(recoil_velocity(w, m), 0.01) < 1e-12);
  CHECK(rel_diff(recoil_velocity(2.0 * w, m), 2.0 * recoil_velocity(w, m)) < 1e-15);
  CHECK(rel_diff(recoil_velocity(w, 2.0 * m), 0.5 * recoil_velocity(w, m)) < 1e-15);
  CHECK(rel_diff(recoil_velocity(w, m) * m * constants::c, constants::hbar * w) < 1e-15);
  CHECK_THROWS_AS(recoil_velocity(0.0, m), ConfigError);
  CHECK_THROWS_AS(recoil_velocity(w, 0.0), ConfigError);
}

TEST_CASE("validation") {
  const ExperimentConfig good = reference_config();
  CHECK_NOTHROW(validate(good));

  SUBCASE("lattice constant must be below the wavelength") {
    auto cfg = good;
    cfg.lattice_constant_a = cfg.wavelength_lambda;
    CHECK(error_of(cfg) == ConfigErrc::lattice_not_subwavelength);
  }
  SUBCASE("confinement below unity") {
    auto cfg = good;
    cfg.confinement_f = 0.5;
    CHECK(error_of(cfg) == ConfigErrc::confinement_below_unity);
  }
  SUBCASE("f = 1 is allowed") {
    auto cfg = good;
    cfg.confinement_f = 1.0;
    CHECK_NOTHROW(validate(cfg));
  }
  SUBCASE("non-positive physical quantities") {
    auto cfg = good;
    cfg.beam_area_A = 0.0;
    CHECK(error_of(cfg) == ConfigErrc::non_positive);
    cfg = good;
    cfg.atom_mass_m = -1.0;
    CHECK(error_of(cfg) == ConfigErrc::non_positive);
    cfg = good;
    cfg.dipole_mu = 0.0;
    CHECK(error_of(cfg) == ConfigErrc::non_positive);
  }
  SUBCASE("filling") {
    auto cfg = good;
    cfg.atoms_per_site_N = 0;
    CHECK(error_of(cfg) == ConfigErrc::invalid_filling);
  }
  SUBCASE("negative scattering lengths are allowed") {
    auto cfg = good;
    cfg.scattering_length_a_pm = -10e-9;
    CHECK_NOTHROW(validate(cfg));
  }
  CHECK(good.density() == doctest::Approx(1.0 / (400e-9 * 400e-9 * 400e-9)).epsilon(1e-14));
}

TEST_CASE("json round trip and fail-closed parsing") {
  const ExperimentConfig cfg = reference_config();
  const nlohmann::json doc = to_json(cfg);
  const ExperimentConfig back = config_from_json(doc);
  CHECK(back.wavelength_lambda == cfg.wavelength_lambda);
  CHECK(back.control_rabi_Omega0 == cfg.control_rabi_Omega0);
  CHECK(back.atoms_per_site_N == cfg.atoms_per_site_N);
  CHECK_FALSE(back.control_omega_c.has_value());

  auto extra = doc;
  extra["wavelenght_lambda"] = 1.0;
  CHECK(parse_error_of(extra) == ConfigErrc::unknown_key);

  auto missing = doc;
  missing.erase("dipole_mu");
  CHECK(parse_error_of(missing) == ConfigErrc::missing_field);

  auto wrong_type = doc;
  wrong_type["beam_area_A"] = "big";
  CHECK(parse_error_of(wrong_type) == ConfigErrc::type_mismatch);

  auto fractional = doc;
  fractional["atoms_per_site_N"] = 1.5;
  CHECK(parse_error_of(fractional) == ConfigErrc::invalid_filling);

  CHECK_NOTHROW(config_from_json(extra, {"wavelenght_lambda"}));

  try {
    parse_config("{ not json");
    FAIL("parsed");
  } catch (const ConfigError& e) {
    CHECK(e.code() == ConfigErrc::parse_error);
  }
}

TEST_CASE("detunings") {
  ExperimentConfig cfg = reference_config();
  CHECK_THROWS_AS(detunings(cfg), ConfigError);

  const double m = cfg.atom_mass_m;
  const double w = cfg.probe_omega;
  const double k = w / constants::c;
  const double kc = 0.9 * k;
  const double omega_c = 1e15;
  const double f3 = 1000.0;
  const double n = cfg.density();
  const double shift_p = collision_strength(cfg.scattering_length_a_gp, m) * n * f3;
  const double shift_m = collision_strength(cfg.scattering_length_a_gm, m) * n * f3;
  const double recoil_e = constants::hbar * k * k / (2.0 * m);
  const double recoil_q = constants::hbar * (k - kc) * (k - kc) / (2.0 * m);

  cfg.control_omega_c = omega_c;
  cfg.wavenumber_k = k;
  cfg.wavenumber_k_c = kc;

  SUBCASE("resonant by construction") {
    cfg.omega_e_plus = w - recoil_e;
    cfg.omega_e_minus = w - recoil_e;
    cfg.omega_q_plus = w - omega_c - recoil_q - shift_p;
    cfg.omega_q_minus = w - omega_c - recoil_q - shift_m;
    const Detunings d = detunings(cfg);
    CHECK(std::abs(d.e_plus) < 1.0);
    CHECK(std::abs(d.q_plus + d.q_shift_plus) < 1.0);
    CHECK(d.resonant);
    CHECK(d.warnings.empty());
  }
  SUBCASE("kinetic term cancels for k = k_c") {
    cfg.wavenumber_k_c = k;
    cfg.omega_e_plus = cfg.omega_e_minus = 2e15;
    cfg.omega_q_plus = cfg.omega_q_minus = w - omega_c;
    const Detunings d = detunings(cfg);
    CHECK(d.q_plus == 0.0);
    CHECK(d.q_minus == 0.0);
  }
  SUBCASE("generic values match the formulas and only warn") {
    cfg.omega_e_plus = 2.3e15;
    cfg.omega_e_minus = 2.4e15;
    cfg.omega_q_plus = 1.3e15;
    cfg.omega_q_minus = 1.4e15;
    const Detunings d = detunings(cfg);
    CHECK(rel_diff(d.e_plus, 2.3e15 - w + recoil_e) < 1e-12);
    CHECK(rel_diff(d.e_minus, 2.4e15 - w + recoil_e) < 1e-12);
    CHECK(rel_diff(d.q_plus, 1.3e15 - w + omega_c + recoil_q) < 1e-12);
    CHECK(rel_diff(d.q_minus, 1.4e15 - w + omega_c + recoil_q) < 1e-12);
    CHECK(rel_diff(d.q_shift_plus, shift_p) < 1e-12);
    CHECK_FALSE(d.resonant);
    CHECK(d.warnings.size() == 4);
    CHECK(d.tolerance == doctest::Approx(1e-6 * cfg.control_rabi_Omega0));
  }
}
