#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "polariton/params.hpp"
#include "polariton/scattering.hpp"
#include "polariton/site_dynamics.hpp"

namespace polariton::cli {

/// Grid and FD settings after defaults have been applied.
struct GridSettings {
  scattering::GridSpec spec;
  double courant{};
  double epsilon{};
};

struct AdiabaticSettings {
  site::DriveProfile drive;
  site::IntegrationSettings integration;
  double transient_window{};
  std::vector<double> eta_ladder;
  site::cplx ladder_amplitude{};  // peak field of the eta-ladder pulses
  bool explicit_t_end{false};
};

/// A parsed configuration document: the experiment plus the optional run
/// sections, with every default resolved.
struct RunConfig {
  nlohmann::json document;
  ExperimentConfig experiment;
  double pulse_length{};
  std::optional<double> gamma_q;
  scattering::PulseEnvelope pulse_plus;
  scattering::PulseEnvelope pulse_minus;
  GridSettings grid;
  std::optional<std::vector<double>> snapshots;
  AdiabaticSettings adiabatic;

  scattering::InitialCondition initial_condition() const;
  /// Time for the envelope centers to cross from xi0 to -xi0.
  double crossing_time(double v_gr) const;
  /// Resolved settings of every section, for the run manifest.
  nlohmann::json resolved() const;
};

inline constexpr double default_courant = 0.9995;

RunConfig parse_run_config(const nlohmann::json& document);
RunConfig load_run_config(const std::filesystem::path& path);

/// "zero", "constant:AMP", "ramp:SLOPE", "gaussian:AMP,WIDTH[,CENTER]" applied
/// to both polarizations; amplitudes in V/m, times in s.
site::DriveProfile parse_drive_spec(const std::string& spec);

/// Integration end covering every Gaussian pulse out to 8 widths past its
/// center, and at least 200 / |Omega0|.
double default_t_end(const site::DriveProfile& drive, double t_start, double omega);

/// Gaussian drive sharing `shape`'s amplitude with width 1 / (|Omega0| eta),
/// centered 8 widths after t = 0.
site::GaussianDrive gaussian_for_eta(const ExperimentConfig& config, site::cplx amplitude,
                                     double eta);

}  // namespace polariton::cli
