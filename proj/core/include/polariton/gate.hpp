#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "polariton/dispersion.hpp"
#include "polariton/params.hpp"

namespace polariton::gate {

/// dphi = (a_{+-} lambda / A) (v_rec / v_gr) f^3. Takes no pulse parameters:
/// the collision phase is independent of pulse length and shape.
double delta_phi(const ExperimentConfig& config, double v_gr);

/// T = L / (2 v_gr).
double interaction_time(double pulse_length, double v_gr);

/// Pulses shorter than this many wavelengths are flagged.
inline constexpr double min_pulse_wavelengths = 10.0;

struct GateReport {
  double delta_phi{};
  double interaction_time_T{};
  double interaction_time_min_estimate{};  // 10 lambda / v_gr
  double v_gr{};
  double v_rec{};
  double theta{};
  double compression_ratio{};
  double phase_error{};  // | |dphi| - pi |
  std::optional<double> delta_phi_measured;
  std::optional<double> homogeneity;
  std::optional<double> dephasing_amplitude_factor;
  std::vector<std::string> warnings;
};

GateReport make_report(const ExperimentConfig& config, const EitMedium& medium,
                       double pulse_length, std::optional<double> gamma_q = std::nullopt);

nlohmann::json to_json(const GateReport& report);

enum class SweepAxis { confinement_f, group_velocity, beam_area, scattering_length_pm };

SweepAxis parse_axis(std::string_view name);
std::string_view axis_name(SweepAxis axis);

struct SweepResult {
  SweepAxis axis{};
  std::vector<double> values;
  std::vector<GateReport> reports;
  std::optional<double> crossing;  // axis value where |dphi| = pi
  std::optional<GateReport> crossing_report;
};

/// Evaluates `samples` equidistant points on [lo, hi]. For the v_gr and A
/// axes the crossing is interpolated in the reciprocal variable, where dphi
/// is linear.
SweepResult sweep(const ExperimentConfig& config, SweepAxis axis, double lo, double hi,
                  std::size_t samples, double pulse_length);

/// One `sample` row per point, then a `crossing` row when one exists.
void write_sweep_csv(std::ostream& out, const SweepResult& result);

}  // namespace polariton::gate
