#include "cli/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "polariton/dispersion.hpp"
#include "polariton/errors.hpp"

namespace polariton::cli {

namespace {

using nlohmann::json;

const std::vector<std::string> kSections = {"pulse",    "dephasing", "initial_condition",
                                            "grid",     "evolve",    "adiabatic"};

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  if (!obj.is_object())
    throw ConfigError(ConfigErrc::type_mismatch, where, where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
      throw ConfigError(ConfigErrc::unknown_key, where + "." + it.key(),
                        "unknown key: " + where + "." + it.key());
  }
}

double number(const json& obj, const std::string& where, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number() || !std::isfinite(v.get<double>()))
    throw ConfigError(ConfigErrc::type_mismatch, where + "." + key,
                      where + "." + key + ": expected a finite number");
  return v.get<double>();
}

std::optional<double> optional_number(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  return number(obj, where, key);
}

double positive(double x, const std::string& key) {
  if (!(x > 0.0)) throw ConfigError(ConfigErrc::non_positive, key, key + " must be > 0");
  return x;
}

std::size_t count(const json& obj, const std::string& where, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 2)
    throw ConfigError(ConfigErrc::invalid_argument, where + "." + key,
                      where + "." + key + ": expected an integer >= 2");
  return v.get<std::size_t>();
}

// A complex amplitude: a number or a two-element [re, im] array.
site::cplx complex_value(const json& obj, const std::string& where, const char* key) {
  const auto& v = obj.at(key);
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(ConfigErrc::type_mismatch, where + "." + key,
                    where + "." + key + ": expected a number or [re, im]");
}

std::string shape_of(const json& obj, const std::string& where) {
  if (!obj.is_object() || !obj.contains("shape") || !obj.at("shape").is_string())
    throw ConfigError(ConfigErrc::missing_field, where + ".shape", where + ".shape is required");
  return obj.at("shape").get<std::string>();
}

scattering::PulseEnvelope parse_pulse(const json& obj, const std::string& where) {
  const std::string shape = shape_of(obj, where);
  if (shape == "gaussian") {
    reject_unknown(obj, where, {"shape", "center", "width"});
    return scattering::GaussianPulse{number(obj, where, "center"),
                                     positive(number(obj, where, "width"), where + ".width")};
  }
  if (shape == "sampled") {
    reject_unknown(obj, where, {"shape", "z", "re", "im"});
    scattering::SampledPulse pulse;
    const auto doubles = [&](const char* key) {
      if (!obj.contains(key) || !obj.at(key).is_array())
        throw ConfigError(ConfigErrc::missing_field, where + "." + key,
                          where + "." + key + " must be an array");
      return obj.at(key).get<std::vector<double>>();
    };
    pulse.z = doubles("z");
    const auto re = doubles("re");
    const auto im = obj.contains("im") ? doubles("im") : std::vector<double>(re.size(), 0.0);
    if (re.size() != pulse.z.size() || im.size() != pulse.z.size())
      throw ConfigError(ConfigErrc::invalid_argument, where,
                        where + ": z, re and im must have equal length");
    for (std::size_t i = 0; i < re.size(); ++i) pulse.values.emplace_back(re[i], im[i]);
    return pulse;
  }
  throw ConfigError(ConfigErrc::invalid_argument, where + ".shape",
                    where + ".shape must be 'gaussian' or 'sampled'");
}

site::DriveEnvelope parse_drive(const json& obj, const std::string& where) {
  const std::string shape = shape_of(obj, where);
  if (shape == "zero") {
    reject_unknown(obj, where, {"shape"});
    return site::ConstantDrive{};
  }
  if (shape == "constant") {
    reject_unknown(obj, where, {"shape", "amplitude"});
    return site::ConstantDrive{complex_value(obj, where, "amplitude")};
  }
  if (shape == "ramp") {
    reject_unknown(obj, where, {"shape", "slope", "origin"});
    return site::RampDrive{complex_value(obj, where, "slope"),
                           optional_number(obj, where, "origin").value_or(0.0)};
  }
  if (shape == "gaussian") {
    reject_unknown(obj, where, {"shape", "amplitude", "center", "width"});
    return site::GaussianDrive{complex_value(obj, where, "amplitude"),
                               number(obj, where, "center"),
                               positive(number(obj, where, "width"), where + ".width")};
  }
  throw ConfigError(ConfigErrc::invalid_argument, where + ".shape",
                    where + ".shape must be zero, constant, ramp or gaussian");
}

json pulse_to_json(const scattering::PulseEnvelope& env) {
  if (const auto* g = std::get_if<scattering::GaussianPulse>(&env))
    return {{"shape", "gaussian"}, {"center", g->center}, {"width", g->width}};
  const auto& s = std::get<scattering::SampledPulse>(env);
  json re = json::array(), im = json::array();
  for (const auto& v : s.values) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  return {{"shape", "sampled"}, {"z", s.z}, {"re", re}, {"im", im}};
}

json complex_to_json(site::cplx v) { return json::array({v.real(), v.imag()}); }

json drive_to_json(const site::DriveEnvelope& env) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, site::ConstantDrive>)
          return {{"shape", "constant"}, {"amplitude", complex_to_json(d.amplitude)}};
        else if constexpr (std::is_same_v<T, site::RampDrive>)
          return {{"shape", "ramp"}, {"slope", complex_to_json(d.slope)}, {"origin", d.origin}};
        else
          return {{"shape", "gaussian"},
                  {"amplitude", complex_to_json(d.amplitude)},
                  {"center", d.center},
                  {"width", d.width}};
      },
      env.shape());
}

const char* initial_state_name(site::InitialState s) {
  return s == site::InitialState::ground ? "ground" : "adiabatic";
}

}  // namespace

double default_t_end(const site::DriveProfile& drive, double t_start, double omega) {
  double span = 200.0 / omega;
  for (const auto* env : {&drive.plus, &drive.minus})
    if (const auto* g = std::get_if<site::GaussianDrive>(&env->shape()))
      span = std::max(span, g->center + 8.0 * g->width - t_start);
  return t_start + span;
}

site::GaussianDrive gaussian_for_eta(const ExperimentConfig& config, site::cplx amplitude,
                                     double eta) {
  const double width = 1.0 / (std::abs(config.control_rabi_Omega0) * eta);
  return {amplitude, 8.0 * width, width};
}

site::DriveProfile parse_drive_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    ss.imbue(std::locale::classic());
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        args.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ConfigError(ConfigErrc::invalid_argument, "drive", "bad number in --drive: " + item);
      }
    }
  }
  const auto need = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi)
      throw ConfigError(ConfigErrc::invalid_argument, "drive",
                        "wrong number of arguments in --drive " + spec);
  };
  site::DriveEnvelope env;
  if (kind == "zero") {
    need(0, 0);
  } else if (kind == "constant") {
    need(1, 1);
    env = site::ConstantDrive{args[0]};
  } else if (kind == "ramp") {
    need(1, 1);
    env = site::RampDrive{args[0], 0.0};
  } else if (kind == "gaussian") {
    need(2, 3);
    positive(args[1], "drive width");
    env = site::GaussianDrive{args[0], args.size() == 3 ? args[2] : 8.0 * args[1], args[1]};
  } else {
    throw ConfigError(ConfigErrc::invalid_argument, "drive",
                      "--drive must be zero, constant:A, ramp:S or gaussian:A,W[,T0]");
  }
  return {env, env};
}

scattering::InitialCondition RunConfig::initial_condition() const {
  return {pulse_plus, pulse_minus};
}

double RunConfig::crossing_time(double v_gr) const {
  return std::abs(initial_condition().initial_separation()) / v_gr;
}

RunConfig parse_run_config(const json& document) {
  RunConfig rc;
  rc.document = document;
  rc.experiment = config_from_json(document, kSections);
  const ExperimentConfig& cfg = rc.experiment;
  const auto section = [&](const char* name) -> json {
    return document.contains(name) ? document.at(name) : json::object();
  };

  const json pulse = section("pulse");
  reject_unknown(pulse, "pulse", {"pulse_length_L"});
  rc.pulse_length = positive(optional_number(pulse, "pulse", "pulse_length_L")
                                 .value_or(10.0 * cfg.wavelength_lambda),
                             "pulse.pulse_length_L");

  const json dephasing = section("dephasing");
  reject_unknown(dephasing, "dephasing", {"gamma_q"});
  rc.gamma_q = optional_number(dephasing, "dephasing", "gamma_q");
  if (rc.gamma_q && *rc.gamma_q < 0.0)
    throw ConfigError(ConfigErrc::invalid_argument, "dephasing.gamma_q", "gamma_q must be >= 0");

  const json initial = section("initial_condition");
  reject_unknown(initial, "initial_condition", {"plus", "minus"});
  const double width = rc.pulse_length / 4.0;
  rc.pulse_plus = initial.contains("plus")
                      ? parse_pulse(initial.at("plus"), "initial_condition.plus")
                      : scattering::GaussianPulse{-6.0 * width, width};
  rc.pulse_minus = initial.contains("minus")
                       ? parse_pulse(initial.at("minus"), "initial_condition.minus")
                       : scattering::GaussianPulse{6.0 * width, width};

  const auto ic = rc.initial_condition();
  const json grid = section("grid");
  reject_unknown(grid, "grid",
                 {"xi_points", "R_points", "xi_half_width", "R_half_width", "courant", "epsilon"});
  auto spec = scattering::GridSpec::defaults_for(ic.envelope_width(), ic.center_of_mass());
  spec.xi_points = count(grid, "grid", "xi_points", spec.xi_points);
  spec.R_points = count(grid, "grid", "R_points", spec.R_points);
  if (auto v = optional_number(grid, "grid", "xi_half_width"))
    spec.xi_half_width = positive(*v, "grid.xi_half_width");
  if (auto v = optional_number(grid, "grid", "R_half_width"))
    spec.R_half_width = positive(*v, "grid.R_half_width");
  rc.grid.spec = spec;
  rc.grid.courant = optional_number(grid, "grid", "courant").value_or(default_courant);
  if (!(rc.grid.courant > 0.0 && rc.grid.courant <= 1.0))
    throw ConfigError(ConfigErrc::invalid_argument, "grid.courant", "courant must be in (0, 1]");
  rc.grid.epsilon = optional_number(grid, "grid", "epsilon")
                        .value_or(scattering::default_regularization(spec.xi_axis().step(),
                                                                     ic.envelope_width()));
  positive(rc.grid.epsilon, "grid.epsilon");

  const json evolve = section("evolve");
  reject_unknown(evolve, "evolve", {"snapshots"});
  if (evolve.contains("snapshots")) {
    if (!evolve.at("snapshots").is_array())
      throw ConfigError(ConfigErrc::type_mismatch, "evolve.snapshots", "snapshots must be an array");
    rc.snapshots = evolve.at("snapshots").get<std::vector<double>>();
  }

  const json adiabatic = section("adiabatic");
  reject_unknown(adiabatic, "adiabatic",
                 {"drive", "t_start", "t_end", "dt", "initial_state", "transient_window",
                  "eta_ladder", "record_stride"});
  const double omega = std::abs(cfg.control_rabi_Omega0);
  // Default probe: Gaussian at eta = 1e-2 with |q0| = 1e-3 sqrt(N).
  const site::cplx weak_amplitude = 1e-3 * omega / site::probe_coupling(cfg) *
                                    std::sqrt(static_cast<double>(cfg.atoms_per_site_N));
  auto& ad = rc.adiabatic;
  if (adiabatic.contains("drive")) {
    const json& d = adiabatic.at("drive");
    reject_unknown(d, "adiabatic.drive", {"plus", "minus"});
    ad.drive.plus = d.contains("plus") ? parse_drive(d.at("plus"), "adiabatic.drive.plus")
                                       : site::DriveEnvelope{};
    ad.drive.minus = d.contains("minus") ? parse_drive(d.at("minus"), "adiabatic.drive.minus")
                                         : site::DriveEnvelope{};
  } else {
    const site::DriveEnvelope env = gaussian_for_eta(cfg, weak_amplitude, 1e-2);
    ad.drive = {env, env};
  }
  ad.integration.t_start = optional_number(adiabatic, "adiabatic", "t_start").value_or(0.0);
  ad.integration.dt = positive(
      optional_number(adiabatic, "adiabatic", "dt").value_or(0.02 / omega), "adiabatic.dt");
  ad.explicit_t_end = adiabatic.contains("t_end");
  ad.integration.t_end = optional_number(adiabatic, "adiabatic", "t_end")
                             .value_or(default_t_end(ad.drive, ad.integration.t_start, omega));
  if (!(ad.integration.t_end > ad.integration.t_start))
    throw ConfigError(ConfigErrc::invalid_argument, "adiabatic.t_end", "t_end must exceed t_start");
  const auto* shaped = std::get_if<site::GaussianDrive>(&ad.drive.plus.shape());
  ad.ladder_amplitude = shaped ? shaped->amplitude : weak_amplitude;
  ad.integration.initial = site::InitialState::adiabatic;
  if (adiabatic.contains("initial_state")) {
    const auto s = adiabatic.at("initial_state").get<std::string>();
    if (s == "ground")
      ad.integration.initial = site::InitialState::ground;
    else if (s != "adiabatic")
      throw ConfigError(ConfigErrc::invalid_argument, "adiabatic.initial_state",
                        "initial_state must be 'ground' or 'adiabatic'");
  }
  ad.transient_window =
      optional_number(adiabatic, "adiabatic", "transient_window").value_or(10.0 / omega);
  ad.eta_ladder = adiabatic.contains("eta_ladder")
                      ? adiabatic.at("eta_ladder").get<std::vector<double>>()
                      : std::vector<double>{1e-1, 1e-2, 1e-3};
  for (double eta : ad.eta_ladder) positive(eta, "adiabatic.eta_ladder");
  if (adiabatic.contains("record_stride")) {
    const auto& v = adiabatic.at("record_stride");
    if (!v.is_number_integer() || v.get<long long>() < 1)
      throw ConfigError(ConfigErrc::invalid_argument, "adiabatic.record_stride",
                        "record_stride must be an integer >= 1");
    ad.integration.record_stride = v.get<std::size_t>();
  }
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(ConfigErrc::parse_error, "", path.string() + ": " + e.what());
  }
  return parse_run_config(doc);
}

json RunConfig::resolved() const {
  json doc;
  doc["experiment"] = to_json(experiment);
  doc["pulse"] = {{"pulse_length_L", pulse_length}};
  doc["dephasing"] = {{"gamma_q", gamma_q ? json(*gamma_q) : json(nullptr)}};
  doc["initial_condition"] = {{"plus", pulse_to_json(pulse_plus)},
                              {"minus", pulse_to_json(pulse_minus)}};
  doc["grid"] = {{"xi_points", grid.spec.xi_points},
                 {"R_points", grid.spec.R_points},
                 {"xi_half_width", grid.spec.xi_half_width},
                 {"R_half_width", grid.spec.R_half_width},
                 {"R_center", grid.spec.R_center},
                 {"courant", grid.courant},
                 {"epsilon", grid.epsilon}};
  doc["evolve"] = {{"snapshots", snapshots ? json(*snapshots) : json(nullptr)}};
  doc["adiabatic"] = {{"drive", {{"plus", drive_to_json(adiabatic.drive.plus)},
                                 {"minus", drive_to_json(adiabatic.drive.minus)}}},
                      {"t_start", adiabatic.integration.t_start},
                      {"t_end", adiabatic.integration.t_end},
                      {"dt", adiabatic.integration.dt},
                      {"initial_state", initial_state_name(adiabatic.integration.initial)},
                      {"transient_window", adiabatic.transient_window},
                      {"eta_ladder", adiabatic.eta_ladder},
                      {"ladder_amplitude", complex_to_json(adiabatic.ladder_amplitude)},
                      {"record_stride", adiabatic.integration.record_stride}};

  json derived;
  derived["density_n"] = experiment.density();
  derived["v_rec"] = recoil_velocity(experiment.probe_omega, experiment.atom_mass_m);
  derived["v_gr"] = group_velocity(experiment);
  derived["u_pm"] = collision_strength(experiment.scattering_length_a_pm, experiment.atom_mass_m);
  doc["derived"] = derived;
  return doc;
}

}  // namespace polariton::cli
