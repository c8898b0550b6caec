#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>

#include "oracles.hpp"
#include "polariton/params.hpp"

namespace polariton::testing {

/// 800 nm probe, A = lambda^2, f = 10, a_{+-} = 10 nm, v_rec = 1 cm/s and
/// v_gr = 10 v_rec.
inline ExperimentConfig reference_config() {
  ExperimentConfig c;
  c.wavelength_lambda = 800e-9;
  c.beam_area_A = 800e-9 * 800e-9;
  c.lattice_constant_a = 400e-9;
  c.confinement_f = 10.0;
  c.atoms_per_site_N = 1;
  c.scattering_length_a_pm = 10e-9;
  c.scattering_length_a_pp = 10e-9;
  c.scattering_length_a_mm = 10e-9;
  c.scattering_length_a_g = 5e-9;
  c.scattering_length_a_gp = 5e-9;
  c.scattering_length_a_gm = 5e-9;
  c.atom_mass_m = oracle::atom_mass_for_1cm_per_s;
  c.control_rabi_Omega0 = oracle::control_rabi_for_10_recoil;
  c.dipole_mu = 3.584e-29;
  c.probe_omega = oracle::probe_omega_800nm;
  return c;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

/// Shortest signed distance between two angles.
inline double angle_diff(double a, double b) { return std::remainder(a - b, 2.0 * std::numbers::pi); }

#ifdef POLARITON_SOURCE_DIR
inline std::filesystem::path source_path(const std::string& rel) {
  return std::filesystem::path(POLARITON_SOURCE_DIR) / rel;
}
#endif

}  // namespace polariton::testing
