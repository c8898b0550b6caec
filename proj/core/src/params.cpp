#include "polariton/params.hpp"

#include <cmath>
#include <sstream>

#include "polariton/constants.hpp"
#include "polariton/errors.hpp"

namespace polariton {

namespace {

using nlohmann::json;

struct Field {
  const char* key;
  double ExperimentConfig::*member;
};

constexpr Field kRealFields[] = {
    {"wavelength_lambda", &ExperimentConfig::wavelength_lambda},
    {"beam_area_A", &ExperimentConfig::beam_area_A},
    {"lattice_constant_a", &ExperimentConfig::lattice_constant_a},
    {"confinement_f", &ExperimentConfig::confinement_f},
    {"scattering_length_a_pm", &ExperimentConfig::scattering_length_a_pm},
    {"scattering_length_a_pp", &ExperimentConfig::scattering_length_a_pp},
    {"scattering_length_a_mm", &ExperimentConfig::scattering_length_a_mm},
    {"scattering_length_a_g", &ExperimentConfig::scattering_length_a_g},
    {"scattering_length_a_gp", &ExperimentConfig::scattering_length_a_gp},
    {"scattering_length_a_gm", &ExperimentConfig::scattering_length_a_gm},
    {"atom_mass_m", &ExperimentConfig::atom_mass_m},
    {"control_rabi_Omega0", &ExperimentConfig::control_rabi_Omega0},
    {"dipole_mu", &ExperimentConfig::dipole_mu},
    {"probe_omega", &ExperimentConfig::probe_omega},
};

struct OptionalField {
  const char* key;
  std::optional<double> ExperimentConfig::*member;
};

constexpr OptionalField kOptionalFields[] = {
    {"control_omega_c", &ExperimentConfig::control_omega_c},
    {"wavenumber_k", &ExperimentConfig::wavenumber_k},
    {"wavenumber_k_c", &ExperimentConfig::wavenumber_k_c},
    {"omega_e_plus", &ExperimentConfig::omega_e_plus},
    {"omega_e_minus", &ExperimentConfig::omega_e_minus},
    {"omega_q_plus", &ExperimentConfig::omega_q_plus},
    {"omega_q_minus", &ExperimentConfig::omega_q_minus},
};

bool is_known_key(const std::string& key) {
  if (key == "atoms_per_site_N") return true;
  for (const auto& f : kRealFields)
    if (key == f.key) return true;
  for (const auto& f : kOptionalFields)
    if (key == f.key) return true;
  return false;
}

double read_real(const json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (!v.is_number())
    throw ConfigError(ConfigErrc::type_mismatch, key, std::string(key) + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x))
    throw ConfigError(ConfigErrc::type_mismatch, key, std::string(key) + ": not finite");
  return x;
}

void require_positive(double value, const char* key) {
  if (!(value > 0.0))
    throw ConfigError(ConfigErrc::non_positive, key, std::string(key) + " must be > 0");
}

}  // namespace

double ExperimentConfig::density() const {
  return static_cast<double>(atoms_per_site_N) /
         (lattice_constant_a * lattice_constant_a * lattice_constant_a);
}

void validate(const ExperimentConfig& config) {
  require_positive(config.wavelength_lambda, "wavelength_lambda");
  require_positive(config.beam_area_A, "beam_area_A");
  require_positive(config.lattice_constant_a, "lattice_constant_a");
  require_positive(config.atom_mass_m, "atom_mass_m");
  require_positive(config.control_rabi_Omega0, "control_rabi_Omega0");
  require_positive(config.dipole_mu, "dipole_mu");
  require_positive(config.probe_omega, "probe_omega");
  if (config.atoms_per_site_N < 1)
    throw ConfigError(ConfigErrc::invalid_filling, "atoms_per_site_N",
                      "atoms_per_site_N must be a positive integer");
  if (!(config.confinement_f >= 1.0))
    throw ConfigError(ConfigErrc::confinement_below_unity, "confinement_f",
                      "confinement_f = a / l0 must be >= 1");
  if (!(config.lattice_constant_a < config.wavelength_lambda))
    throw ConfigError(ConfigErrc::lattice_not_subwavelength, "lattice_constant_a",
                      "lattice_constant_a must be smaller than wavelength_lambda");
  for (const auto& f : kOptionalFields) {
    const auto& v = config.*(f.member);
    if (v && !std::isfinite(*v))
      throw ConfigError(ConfigErrc::type_mismatch, f.key, std::string(f.key) + ": not finite");
  }
  for (const auto& [key, value] : {std::pair{"control_omega_c", config.control_omega_c},
                                   std::pair{"omega_e_plus", config.omega_e_plus},
                                   std::pair{"omega_e_minus", config.omega_e_minus},
                                   std::pair{"omega_q_plus", config.omega_q_plus},
                                   std::pair{"omega_q_minus", config.omega_q_minus}}) {
    if (value) require_positive(*value, key);
  }
}

ExperimentConfig config_from_json(const json& doc, const std::vector<std::string>& ignored_keys) {
  if (!doc.is_object())
    throw ConfigError(ConfigErrc::type_mismatch, "", "configuration must be a JSON object");

  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (is_known_key(it.key())) continue;
    bool ignored = false;
    for (const auto& k : ignored_keys) ignored = ignored || k == it.key();
    if (!ignored)
      throw ConfigError(ConfigErrc::unknown_key, it.key(), "unknown key: " + it.key());
  }
  const auto require_key = [&](const char* key) {
    if (!doc.contains(key))
      throw ConfigError(ConfigErrc::missing_field, key, std::string("missing field: ") + key);
  };
  for (const auto& f : kRealFields) require_key(f.key);
  require_key("atoms_per_site_N");

  ExperimentConfig config;
  for (const auto& f : kRealFields) config.*(f.member) = read_real(doc, f.key);
  for (const auto& f : kOptionalFields)
    if (doc.contains(f.key)) config.*(f.member) = read_real(doc, f.key);

  const auto& n = doc.at("atoms_per_site_N");
  if (!n.is_number_integer())
    throw ConfigError(ConfigErrc::invalid_filling, "atoms_per_site_N",
                      "atoms_per_site_N must be an integer");
  config.atoms_per_site_N = n.get<long>();

  validate(config);
  return config;
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(ConfigErrc::parse_error, "", e.what());
  }
  return config_from_json(doc);
}

json to_json(const ExperimentConfig& config) {
  json doc = json::object();
  for (const auto& f : kRealFields) doc[f.key] = config.*(f.member);
  doc["atoms_per_site_N"] = config.atoms_per_site_N;
  for (const auto& f : kOptionalFields)
    if (const auto& v = config.*(f.member)) doc[f.key] = *v;
  return doc;
}

double collision_strength(double scattering_length, double mass) {
  if (!(mass > 0.0))
    throw ConfigError(ConfigErrc::non_positive, "atom_mass_m", "mass must be > 0");
  return 4.0 * constants::pi * scattering_length * constants::hbar / mass;
}

double recoil_velocity(double probe_omega, double mass) {
  if (!(probe_omega > 0.0))
    throw ConfigError(ConfigErrc::non_positive, "probe_omega", "probe_omega must be > 0");
  if (!(mass > 0.0))
    throw ConfigError(ConfigErrc::non_positive, "atom_mass_m", "mass must be > 0");
  return constants::hbar * probe_omega / (mass * constants::c);
}

Detunings detunings(const ExperimentConfig& config, std::optional<double> tolerance) {
  const auto need = [](const std::optional<double>& v, const char* key) {
    if (!v)
      throw ConfigError(ConfigErrc::missing_field, key,
                        std::string("detuning check needs ") + key);
    return *v;
  };
  const double omega_c = need(config.control_omega_c, "control_omega_c");
  const double k = need(config.wavenumber_k, "wavenumber_k");
  const double k_c = need(config.wavenumber_k_c, "wavenumber_k_c");
  const double omega_ep = need(config.omega_e_plus, "omega_e_plus");
  const double omega_em = need(config.omega_e_minus, "omega_e_minus");
  const double omega_qp = need(config.omega_q_plus, "omega_q_plus");
  const double omega_qm = need(config.omega_q_minus, "omega_q_minus");

  const double m = config.atom_mass_m;
  const double omega = config.probe_omega;
  const double kinetic_e = constants::hbar * k * k / (2.0 * m);
  const double dk = k - k_c;
  const double kinetic_q = constants::hbar * dk * dk / (2.0 * m);

  Detunings d;
  d.e_plus = omega_ep - omega + kinetic_e;
  d.e_minus = omega_em - omega + kinetic_e;
  d.q_plus = omega_qp - omega + omega_c + kinetic_q;
  d.q_minus = omega_qm - omega + omega_c + kinetic_q;

  const double f3 = config.confinement_f * config.confinement_f * config.confinement_f;
  const double n = config.density();
  d.q_shift_plus = collision_strength(config.scattering_length_a_gp, m) * n * f3;
  d.q_shift_minus = collision_strength(config.scattering_length_a_gm, m) * n * f3;

  d.tolerance = tolerance.value_or(1e-6 * std::abs(config.control_rabi_Omega0));
  const auto off = [&](double x) { return std::abs(x) > d.tolerance; };
  const auto warn = [&](const char* what, double value) {
    std::ostringstream msg;
    msg << what << " = " << value << " rad/s exceeds resonance tolerance " << d.tolerance;
    d.warnings.push_back(msg.str());
  };
  if (off(d.e_plus)) warn("Delta_e+", d.e_plus);
  if (off(d.e_minus)) warn("Delta_e-", d.e_minus);
  if (off(d.q_plus + d.q_shift_plus)) warn("Delta_q+ + u_g+ n f^3", d.q_plus + d.q_shift_plus);
  if (off(d.q_minus + d.q_shift_minus))
    warn("Delta_q- + u_g- n f^3", d.q_minus + d.q_shift_minus);
  d.resonant = d.warnings.empty();
  return d;
}

}  // namespace polariton
