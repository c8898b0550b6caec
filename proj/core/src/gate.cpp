#include "polariton/gate.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "polariton/constants.hpp"
#include "polariton/errors.hpp"
#include "polariton/format.hpp"

namespace polariton::gate {

double delta_phi(const ExperimentConfig& config, double v_gr) {
  if (!(config.beam_area_A > 0.0))
    throw ConfigError(ConfigErrc::non_positive, "beam_area_A", "beam area must be > 0");
  if (!(v_gr > 0.0))
    throw ConfigError(ConfigErrc::non_positive, "v_gr", "group velocity must be > 0");
  const double v_rec = recoil_velocity(config.probe_omega, config.atom_mass_m);
  const double f = config.confinement_f;
  return config.scattering_length_a_pm * config.wavelength_lambda / config.beam_area_A *
         (v_rec / v_gr) * f * f * f;
}

double interaction_time(double pulse_length, double v_gr) {
  if (!(pulse_length > 0.0))
    throw ConfigError(ConfigErrc::non_positive, "pulse_length_L", "pulse length must be > 0");
  if (!(v_gr > 0.0))
    throw ConfigError(ConfigErrc::non_positive, "v_gr", "group velocity must be > 0");
  return pulse_length / (2.0 * v_gr);
}

GateReport make_report(const ExperimentConfig& config, const EitMedium& medium,
                       double pulse_length, std::optional<double> gamma_q) {
  GateReport r;
  r.delta_phi = delta_phi(config, medium.v_gr);
  r.interaction_time_T = interaction_time(pulse_length, medium.v_gr);
  r.interaction_time_min_estimate =
      min_pulse_wavelengths * config.wavelength_lambda / medium.v_gr;
  r.v_gr = medium.v_gr;
  r.v_rec = medium.v_rec;
  r.theta = medium.theta.radians();
  r.compression_ratio = medium.compression_ratio;
  r.phase_error = std::abs(r.delta_phi - constants::pi);
  r.warnings = medium.warnings;
  if (pulse_length < min_pulse_wavelengths * config.wavelength_lambda) {
    std::ostringstream msg;
    msg << "pulse length " << pulse_length << " m is below " << min_pulse_wavelengths
        << " wavelengths";
    r.warnings.push_back(msg.str());
  }
  if (gamma_q) {
    if (!(*gamma_q >= 0.0))
      throw ConfigError(ConfigErrc::invalid_argument, "gamma_q", "dephasing rate must be >= 0");
    r.dephasing_amplitude_factor =
        std::exp(-2.0 * *gamma_q * medium.theta.sin2() * r.interaction_time_T);
  }
  return r;
}

nlohmann::json to_json(const GateReport& report) {
  nlohmann::json doc{
      {"delta_phi", report.delta_phi},
      {"interaction_time_T", report.interaction_time_T},
      {"interaction_time_min_estimate", report.interaction_time_min_estimate},
      {"v_gr", report.v_gr},
      {"v_rec", report.v_rec},
      {"theta", report.theta},
      {"compression_ratio", report.compression_ratio},
      {"phase_error", report.phase_error},
      {"warnings", report.warnings},
  };
  const auto optional = [&](const char* key, const std::optional<double>& v) {
    doc[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  optional("delta_phi_measured", report.delta_phi_measured);
  optional("homogeneity", report.homogeneity);
  optional("dephasing_amplitude_factor", report.dephasing_amplitude_factor);
  return doc;
}

SweepAxis parse_axis(std::string_view name) {
  if (name == "f") return SweepAxis::confinement_f;
  if (name == "v_gr") return SweepAxis::group_velocity;
  if (name == "A") return SweepAxis::beam_area;
  if (name == "a_pm") return SweepAxis::scattering_length_pm;
  throw ConfigError(ConfigErrc::invalid_argument, "axis",
                    "unknown sweep axis '" + std::string(name) + "' (f, v_gr, A, a_pm)");
}

std::string_view axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::confinement_f: return "f";
    case SweepAxis::group_velocity: return "v_gr";
    case SweepAxis::beam_area: return "A";
    case SweepAxis::scattering_length_pm: return "a_pm";
  }
  return "?";
}

namespace {

GateReport report_at(const ExperimentConfig& base, SweepAxis axis, double x, double pulse_length) {
  ExperimentConfig config = base;
  switch (axis) {
    case SweepAxis::confinement_f:
      config.confinement_f = x;
      break;
    case SweepAxis::beam_area:
      config.beam_area_A = x;
      break;
    case SweepAxis::scattering_length_pm:
      config.scattering_length_a_pm = x;
      break;
    case SweepAxis::group_velocity:
      break;
  }
  validate(config);
  const EitMedium medium = axis == SweepAxis::group_velocity ? make_medium(config, x)
                                                              : make_medium(config);
  return make_report(config, medium, pulse_length);
}

// dphi is linear in 1/v_gr and 1/A.
bool reciprocal_axis(SweepAxis axis) {
  return axis == SweepAxis::group_velocity || axis == SweepAxis::beam_area;
}

}  // namespace

SweepResult sweep(const ExperimentConfig& config, SweepAxis axis, double lo, double hi,
                  std::size_t samples, double pulse_length) {
  if (samples < 2)
    throw ConfigError(ConfigErrc::invalid_argument, "samples", "sweep needs >= 2 samples");
  if (!(lo > 0.0) || !(hi >= lo))
    throw ConfigError(ConfigErrc::invalid_argument, "range",
                      "sweep range must satisfy 0 < lo <= hi");

  SweepResult result;
  result.axis = axis;
  for (std::size_t k = 0; k < samples; ++k) {
    const double x = k + 1 == samples
                         ? hi
                         : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples - 1);
    result.values.push_back(x);
    result.reports.push_back(report_at(config, axis, x, pulse_length));
  }

  const double target = constants::pi;
  const auto coord = [&](double x) { return reciprocal_axis(axis) ? 1.0 / x : x; };
  for (std::size_t k = 0; k < samples && !result.crossing; ++k) {
    const double g0 = std::abs(result.reports[k].delta_phi) - target;
    if (g0 == 0.0) {
      result.crossing = result.values[k];
      break;
    }
    if (k + 1 == samples) break;
    const double g1 = std::abs(result.reports[k + 1].delta_phi) - target;
    if ((g0 < 0.0) == (g1 < 0.0) || g1 == 0.0) continue;
    const double u0 = coord(result.values[k]);
    const double u1 = coord(result.values[k + 1]);
    const double u = u0 + (0.0 - g0) * (u1 - u0) / (g1 - g0);
    result.crossing = reciprocal_axis(axis) ? 1.0 / u : u;
  }
  if (result.crossing)
    result.crossing_report = report_at(config, axis, *result.crossing, pulse_length);
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "kind,axis,axis_value,delta_phi,interaction_time_T,v_gr,v_rec,theta,compression_ratio,"
         "phase_error\n";
  const auto row = [&](const char* kind, double x, const GateReport& r) {
    out << kind << ',' << axis_name(result.axis) << ',' << format_number(x) << ','
        << format_number(r.delta_phi) << ',' << format_number(r.interaction_time_T) << ','
        << format_number(r.v_gr) << ',' << format_number(r.v_rec) << ','
        << format_number(r.theta) << ',' << format_number(r.compression_ratio) << ','
        << format_number(r.phase_error) << '\n';
  };
  for (std::size_t k = 0; k < result.values.size(); ++k)
    row("sample", result.values[k], result.reports[k]);
  if (result.crossing) row("crossing", *result.crossing, *result.crossing_report);
}

}  // namespace polariton::gate
