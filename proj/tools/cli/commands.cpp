#include "cli/commands.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cli/manifest.hpp"
#include "cli/run_config.hpp"
#include "polariton/dispersion.hpp"
#include "polariton/errors.hpp"
#include "polariton/format.hpp"
#include "polariton/gate.hpp"
#include "polariton/scattering.hpp"
#include "polariton/site_dynamics.hpp"

#ifndef POLARITON_VERSION
#define POLARITON_VERSION "unknown"
#endif

namespace polariton::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Flags are kept as the strings the user typed so that a re-run from the
// manifest sees exactly the same input.
struct Flags {
  std::string config;
  std::string out_dir = "out";
  std::string solver = "characteristics";
  std::string snapshots;
  std::string axis;
  std::string range;
  std::size_t samples = 50;
  std::string gamma_q;
  std::string seed;
  std::string drive;
  std::string eta;
  bool check = false;
};

json flags_to_json(const std::string& command, const Flags& f) {
  json j = json::object();
  const auto put = [&](const char* key, const std::string& v) {
    if (!v.empty()) j[key] = v;
  };
  if (command == "evolve") {
    j["solver"] = f.solver;
    put("snapshots", f.snapshots);
  }
  if (command == "sweep") {
    put("axis", f.axis);
    put("range", f.range);
    j["samples"] = f.samples;
  }
  if (command == "verify-adiabatic") {
    put("drive", f.drive);
    put("eta", f.eta);
  }
  if (command != "sweep" && command != "verify-adiabatic") put("gamma_q", f.gamma_q);
  put("seed", f.seed);
  return j;
}

Flags flags_from_json(const json& j) {
  Flags f;
  const auto get = [&](const char* key, std::string& v) {
    if (j.contains(key)) v = j.at(key).get<std::string>();
  };
  get("solver", f.solver);
  get("snapshots", f.snapshots);
  get("axis", f.axis);
  get("range", f.range);
  get("gamma_q", f.gamma_q);
  get("seed", f.seed);
  get("drive", f.drive);
  get("eta", f.eta);
  if (j.contains("samples")) f.samples = j.at("samples").get<std::size_t>();
  return f;
}

double parse_number(const std::string& text, const std::string& flag) {
  double v{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v))
    throw ConfigError(ConfigErrc::invalid_argument, flag, "--" + flag + ": not a number: " + text);
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(parse_number(item, flag));
  if (values.empty())
    throw ConfigError(ConfigErrc::invalid_argument, flag, "--" + flag + " needs at least one value");
  return values;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig config_from_text(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(ConfigErrc::parse_error, "", origin + ": " + e.what());
  }
  return parse_run_config(doc);
}

/// Collects the files a command emits, relative to its output directory.
class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_))
      throw IoError("cannot create output directory " + dir_.string());
  }

  template <class Writer>
  void write(const std::string& name, Writer&& writer) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    writer(out);
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
    files_.push_back(name);
  }

  const fs::path& path() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

struct Context {
  const RunConfig& config;
  const Flags& flags;
  OutputDir& dir;
  std::ostream& out;
  std::vector<std::string>& warnings;
};

std::optional<double> gamma_from(const Context& ctx) {
  if (ctx.flags.gamma_q.empty()) return ctx.config.gamma_q;
  const double g = parse_number(ctx.flags.gamma_q, "gamma-q");
  if (g < 0.0) throw ConfigError(ConfigErrc::invalid_argument, "gamma-q", "--gamma-q must be >= 0");
  return g;
}

void append(std::vector<std::string>& to, const std::vector<std::string>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

void cmd_phase(Context& ctx) {
  const ExperimentConfig& cfg = ctx.config.experiment;
  const EitMedium medium = make_medium(cfg);
  gate::GateReport report = gate::make_report(cfg, medium, ctx.config.pulse_length, gamma_from(ctx));
  if (cfg.control_omega_c) append(report.warnings, detunings(cfg).warnings);
  append(ctx.warnings, report.warnings);
  const json doc = gate::to_json(report);
  ctx.dir.write("report.json", [&](std::ostream& os) { write_json(os, doc); });
  write_json(ctx.out, doc);
}

// Rewrites scattering errors with the config change that would avoid them.
[[noreturn]] void rethrow_with_hint(const NumericalError& e, const RunConfig& rc, double v_gr,
                                   double t_max) {
  std::ostringstream msg;
  msg << e.what();
  const double dxi = rc.grid.spec.xi_axis().step();
  switch (e.code()) {
    case NumericalErrc::under_resolved_regularization:
      msg << "; set grid.epsilon >= " << format_number(3.0 * dxi) << " or grid.xi_points >= "
          << static_cast<long long>(std::ceil(2.0 * rc.grid.spec.xi_half_width /
                                              (rc.grid.epsilon / 3.0))) + 1;
      break;
    case NumericalErrc::cfl_violation:
      msg << "; set grid.courant <= 1 (current " << format_number(rc.grid.courant) << ")";
      break;
    case NumericalErrc::support_left_grid: {
      const auto ic = rc.initial_condition();
      const double start = ic.initial_separation();
      const double reach = std::max(std::abs(start), std::abs(start + 2.0 * v_gr * t_max));
      msg << "; set grid.xi_half_width >= " << format_number(reach + 8.0 * ic.envelope_width())
          << " or choose earlier --snapshots";
      break;
    }
    default:
      break;
  }
  throw NumericalError(e.code(), msg.str());
}

std::string snapshot_name(std::size_t i) {
  std::string digits = std::to_string(i);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return "snapshot_" + digits + ".csv";
}

void cmd_evolve(Context& ctx) {
  const RunConfig& rc = ctx.config;
  const ExperimentConfig& cfg = rc.experiment;
  const EitMedium medium = make_medium(cfg);
  const double v = medium.v_gr;
  const auto gamma = gamma_from(ctx);

  if (ctx.flags.solver != "characteristics" && ctx.flags.solver != "fd")
    throw ConfigError(ConfigErrc::invalid_argument, "solver",
                      "--solver must be 'characteristics' or 'fd'");
  const bool fd = ctx.flags.solver == "fd";

  std::vector<double> times;
  if (!ctx.flags.snapshots.empty())
    times = parse_list(ctx.flags.snapshots, "snapshots");
  else if (rc.snapshots)
    times = *rc.snapshots;
  else
    for (int i = 0; i < 5; ++i) times.push_back(rc.crossing_time(v) * i / 4.0);
  if (times.empty())
    throw ConfigError(ConfigErrc::invalid_argument, "snapshots", "no snapshot times given");
  for (double t : times)
    if (!(t >= 0.0) || !std::isfinite(t))
      throw ConfigError(ConfigErrc::invalid_argument, "snapshots", "snapshot times must be >= 0");
  if (!std::is_sorted(times.begin(), times.end()))
    throw ConfigError(ConfigErrc::invalid_argument, "snapshots",
                      "snapshot times must be in increasing order");

  const auto ic = rc.initial_condition();
  const auto R = rc.grid.spec.R_axis();
  const auto xi = rc.grid.spec.xi_axis();
  const scattering::TwoParticleWave initial = ic.sample(R, xi);
  const scattering::FdSettings settings{rc.grid.courant * xi.step() / (2.0 * v), rc.grid.epsilon, 0};

  scattering::TwoParticleWave state = initial;
  try {
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double t = times[i];
      if (fd) {
        if (t > state.t) state = scattering::evolve_fd(state, medium, t - state.t, settings);
      } else {
        state = scattering::evolve_characteristics(ic, R, xi, medium, t);
      }
      const auto shown = gamma ? scattering::apply_dephasing(state, medium, *gamma, t) : state;
      ctx.dir.write(snapshot_name(i),
                    [&](std::ostream& os) { scattering::write_snapshot_csv(os, shown); });
    }
  } catch (const NumericalError& e) {
    rethrow_with_hint(e, rc, v, times.back());
  }

  gate::GateReport report = gate::make_report(cfg, medium, rc.pulse_length, gamma);
  const double t_final = times.back();
  const double transmitted = state.transmitted_fraction();
  if (transmitted >= scattering::required_transmission) {
    const auto m = scattering::extract_phase(initial, state, v, t_final);
    // Report on the 2 pi branch of the configured phase.
    const double turns = std::round((report.delta_phi - m.delta_phi) / (2.0 * std::numbers::pi));
    report.delta_phi_measured = m.delta_phi + 2.0 * std::numbers::pi * turns;
    report.homogeneity = m.homogeneity;
  } else {
    report.warnings.push_back("pulses have not passed through each other by t = " +
                              format_number(t_final) + " s (transmitted fraction " +
                              format_number(transmitted) + "); no phase measured");
  }
  append(ctx.warnings, report.warnings);

  json doc = gate::to_json(report);
  doc["solver"] = ctx.flags.solver;
  doc["snapshot_times"] = times;
  doc["transmitted_fraction"] = transmitted;
  if (fd) {
    doc["fd_dt"] = settings.dt;
    doc["fd_epsilon"] = settings.epsilon;
  }
  ctx.dir.write("report.json", [&](std::ostream& os) { write_json(os, doc); });
  write_json(ctx.out, doc);
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ConfigError(ConfigErrc::invalid_argument, "range", "--range must be LO:HI");
  return {parse_number(text.substr(0, colon), "range"), parse_number(text.substr(colon + 1), "range")};
}

void cmd_sweep(Context& ctx) {
  if (ctx.flags.axis.empty())
    throw ConfigError(ConfigErrc::missing_field, "axis", "sweep needs --axis");
  if (ctx.flags.range.empty())
    throw ConfigError(ConfigErrc::missing_field, "range", "sweep needs --range LO:HI");
  const auto axis = gate::parse_axis(ctx.flags.axis);
  const auto [lo, hi] = parse_range(ctx.flags.range);
  const auto result = gate::sweep(ctx.config.experiment, axis, lo, hi, ctx.flags.samples,
                                  ctx.config.pulse_length);
  ctx.dir.write("sweep.csv", [&](std::ostream& os) { gate::write_sweep_csv(os, result); });

  json summary{{"axis", std::string(gate::axis_name(axis))},
               {"range", {lo, hi}},
               {"samples", result.values.size()},
               {"crossing", result.crossing ? json(*result.crossing) : json(nullptr)}};
  if (result.crossing_report)
    summary["crossing_delta_phi"] = result.crossing_report->delta_phi;
  else
    ctx.warnings.push_back("|delta_phi| does not reach pi on the swept range");
  write_json(ctx.out, summary);
}

std::size_t stride_for(const site::IntegrationSettings& s, std::size_t max_samples) {
  const double steps = std::ceil((s.t_end - s.t_start) / s.dt);
  const auto needed = static_cast<std::size_t>(std::ceil(steps / static_cast<double>(max_samples)));
  return std::max({s.record_stride, needed, std::size_t{1}});
}

json residual_json(const site::AdiabaticResidual& r) {
  return {{"q_abs", r.q_abs},     {"e_abs", r.e_abs},   {"e_zeroth_abs", r.e_zeroth_abs},
          {"q_rel", r.q_rel},     {"e_rel", r.e_rel},   {"e_zeroth_rel", r.e_zeroth_rel},
          {"q_scale", r.q_scale}, {"eta", r.eta}};
}

void cmd_verify_adiabatic(Context& ctx) {
  const RunConfig& rc = ctx.config;
  const ExperimentConfig& cfg = rc.experiment;
  const double omega = std::abs(cfg.control_rabi_Omega0);
  constexpr std::size_t max_samples = 20000;

  site::DriveProfile drive = rc.adiabatic.drive;
  site::IntegrationSettings settings = rc.adiabatic.integration;
  if (!ctx.flags.drive.empty()) {
    drive = parse_drive_spec(ctx.flags.drive);
    if (!rc.adiabatic.explicit_t_end)
      settings.t_end = default_t_end(drive, settings.t_start, omega);
  }
  settings.record_stride = stride_for(settings, max_samples);

  const auto trajectory = site::integrate_site(cfg, drive, settings);
  const auto residual = site::adiabatic_residual(trajectory, drive, cfg, rc.adiabatic.transient_window);
  ctx.dir.write("trajectory.csv",
                [&](std::ostream& os) { site::write_trajectory_csv(os, trajectory, residual); });
  if (!trajectory.weak_probe_ok)
    ctx.warnings.push_back("excited fraction " + format_number(trajectory.max_excited_fraction) +
                           " exceeds the weak-probe limit");

  std::vector<double> etas = ctx.flags.eta.empty() ? rc.adiabatic.eta_ladder
                                                   : parse_list(ctx.flags.eta, "eta");
  for (double eta : etas)
    if (!(eta > 0.0)) throw ConfigError(ConfigErrc::invalid_argument, "eta", "--eta values must be > 0");
  json ladder = json::array();
  std::vector<double> q_rel;
  std::vector<double> e_rel;
  for (double eta : etas) {
    const site::DriveEnvelope pulse = gaussian_for_eta(cfg, rc.adiabatic.ladder_amplitude, eta);
    const site::DriveProfile d{pulse, pulse};
    site::IntegrationSettings s = settings;
    s.t_start = 0.0;
    s.t_end = default_t_end(d, 0.0, omega);
    s.initial = site::InitialState::ground;
    s.record_stride = 1;
    s.record_stride = stride_for(s, max_samples);
    const auto r = site::adiabatic_residual(site::integrate_site(cfg, d, s), d, cfg,
                                            rc.adiabatic.transient_window);
    q_rel.push_back(r.q_rel);
    e_rel.push_back(r.e_rel);
    ladder.push_back(residual_json(r));
  }
  const auto exponent = [&](const std::vector<double>& y) -> json {
    if (etas.size() < 2) return nullptr;
    if (std::any_of(y.begin(), y.end(), [](double v) { return !(v > 0.0); })) return nullptr;
    return site::log_log_slope(etas, y);
  };

  json summary{{"residual", residual_json(residual)},
               {"samples", trajectory.samples.size()},
               {"record_stride", settings.record_stride},
               {"t_start", settings.t_start},
               {"t_end", settings.t_end},
               {"dt", settings.dt},
               {"max_excited_fraction", trajectory.max_excited_fraction},
               {"weak_probe_ok", trajectory.weak_probe_ok},
               {"eta_ladder", ladder},
               {"q_scaling_exponent", exponent(q_rel)},
               {"e_scaling_exponent", exponent(e_rel)}};
  ctx.dir.write("summary.json", [&](std::ostream& os) { write_json(os, summary); });
  write_json(ctx.out, summary);
}

void dispatch(const std::string& command, Context& ctx) {
  if (command == "phase")
    cmd_phase(ctx);
  else if (command == "evolve")
    cmd_evolve(ctx);
  else if (command == "sweep")
    cmd_sweep(ctx);
  else if (command == "verify-adiabatic")
    cmd_verify_adiabatic(ctx);
  else
    throw ConfigError(ConfigErrc::invalid_argument, "command", "unknown command " + command);
}

void emit_warnings(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << dump_json(json{{"warning", w}}, -1) << '\n';
}

/// Runs `command` into `dir` and writes its manifest last.
RunManifest execute(const std::string& command, const std::string& config_text,
                    const std::string& origin, const Flags& flags, const fs::path& dir,
                    std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig config = config_from_text(config_text, origin);
  OutputDir output(dir);
  std::vector<std::string> warnings;
  Context ctx{config, flags, output, out, warnings};
  dispatch(command, ctx);
  emit_warnings(err, warnings);

  RunManifest m;
  m.command = command;
  m.tool_version = POLARITON_VERSION;
  m.output_directory = dir.string();
  m.config_text = config_text;
  m.flags = flags_to_json(command, flags);
  m.resolved_config = config.resolved();
  for (const auto& name : output.files()) m.artifacts.push_back({name, sha256_file(dir / name)});
  m.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(dir, m);
  return m;
}

class TempDir {
 public:
  TempDir() {
    std::string pattern = (fs::temp_directory_path() / "polariton-check-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) throw IoError("cannot create temporary directory");
    path_ = pattern;
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

/// Re-runs the manifest's command and compares every artifact hash.
int check_against(const RunManifest& recorded, const fs::path& dir, std::ostream& out,
                  std::ostream& err) {
  json result;
  result["directory"] = dir.string();
  result["modified"] = verify_artifacts(dir, recorded);

  TempDir scratch;
  std::ostringstream discard;
  std::ostringstream rerun_err;
  const RunManifest fresh = execute(recorded.command, recorded.config_text, "manifest",
                                    flags_from_json(recorded.flags), scratch.path(), discard,
                                    rerun_err);
  std::vector<std::string> differing;
  for (const auto& a : recorded.artifacts) {
    const auto it = std::find_if(fresh.artifacts.begin(), fresh.artifacts.end(),
                                 [&](const Artifact& b) { return b.path == a.path; });
    if (it == fresh.artifacts.end() || it->sha256 != a.sha256) differing.push_back(a.path);
  }
  for (const auto& b : fresh.artifacts) {
    const bool listed = std::any_of(recorded.artifacts.begin(), recorded.artifacts.end(),
                                    [&](const Artifact& a) { return a.path == b.path; });
    if (!listed) differing.push_back(b.path);
  }
  result["differing"] = differing;
  const bool ok = result["modified"].empty() && differing.empty();
  result["status"] = ok ? "ok" : "mismatch";
  write_json(out, result);
  (void)err;
  return ok ? exit_ok : exit_check_mismatch;
}

void report_error(std::ostream& err, const char* kind, const std::string& code,
                  const std::string& key, const std::string& message) {
  json e{{"kind", kind}, {"code", code}, {"message", message}};
  if (!key.empty()) e["key"] = key;
  err << dump_json(json{{"error", e}}, -1) << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-polariton collision simulator", "polariton"};
  app.set_version_flag("--version", POLARITON_VERSION);
  app.require_subcommand(1);

  Flags flags;
  const auto common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", flags.config, "Experiment configuration (JSON)");
    if (needs_config) opt->required();
    sub->add_option("--out", flags.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", flags.seed, "Reserved; every computation is deterministic");
  };
  const auto runnable = [&](CLI::App* sub) {
    common(sub, true);
    sub->add_flag("--check", flags.check,
                  "Re-run and compare against the manifest in --out instead of writing");
  };

  auto* phase = app.add_subcommand("phase", "Conditional phase and gate metrics");
  runnable(phase);
  phase->add_option("--gamma-q", flags.gamma_q, "Spin-coherence dephasing rate (1/s)");

  auto* evolve = app.add_subcommand("evolve", "Evolve the two-polariton wave function");
  runnable(evolve);
  evolve->add_option("--solver", flags.solver, "characteristics or fd")->capture_default_str();
  evolve->add_option("--snapshots", flags.snapshots, "Snapshot times t1,t2,... (s)");
  evolve->add_option("--gamma-q", flags.gamma_q, "Spin-coherence dephasing rate (1/s)");

  auto* sweep = app.add_subcommand("sweep", "Conditional phase along one parameter");
  runnable(sweep);
  sweep->add_option("--axis", flags.axis, "f, v_gr, A or a_pm");
  sweep->add_option("--range", flags.range, "LO:HI");
  sweep->add_option("--samples", flags.samples, "Number of samples")->capture_default_str();

  auto* adiabatic = app.add_subcommand("verify-adiabatic", "Site ODE against adiabatic elimination");
  runnable(adiabatic);
  adiabatic->add_option("--drive", flags.drive, "zero | constant:A | ramp:S | gaussian:A,W[,T0]");
  adiabatic->add_option("--eta", flags.eta, "Adiabaticity ladder eta1,eta2,...");

  auto* check = app.add_subcommand("check", "Verify the outputs listed in a run manifest");
  check->add_option("--out", flags.out_dir, "Output directory holding manifest.json")
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::CallForVersion&) {
    out << POLARITON_VERSION << '\n';
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.get_name(), "", e.what());
    return exit_config_error;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const fs::path dir = flags.out_dir;
    if (command == "check") return check_against(read_manifest(dir), dir, out, err);
    const std::string text = read_text(flags.config);
    if (flags.check) {
      const RunManifest recorded = read_manifest(dir);
      RunManifest expected = recorded;
      expected.command = command;
      expected.config_text = text;
      expected.flags = flags_to_json(command, flags);
      return check_against(expected, dir, out, err);
    }
    execute(command, text, flags.config, flags, dir, out, err);
    return exit_ok;
  } catch (const ConfigError& e) {
    report_error(err, "config", to_string(e.code()), e.key(), e.what());
    return exit_config_error;
  } catch (const NumericalError& e) {
    report_error(err, "numerical", to_string(e.code()), "", e.what());
    return exit_numerical_error;
  } catch (const IoError& e) {
    report_error(err, "io", "io_error", "", e.what());
    return exit_io_error;
  } catch (const json::exception& e) {
    report_error(err, "config", to_string(ConfigErrc::type_mismatch), "", e.what());
    return exit_config_error;
  } catch (const fs::filesystem_error& e) {
    report_error(err, "io", "io_error", "", e.what());
    return exit_io_error;
  }
}

}  // namespace polariton::cli
