#include "polariton/site_dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "polariton/constants.hpp"
#include "polariton/errors.hpp"
#include "polariton/format.hpp"

namespace polariton::site {

namespace {

constexpr cplx I{0.0, 1.0};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// e+, e-, q+, q-
using State = std::array<cplx, 4>;

State operator+(const State& a, const State& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
State operator*(double s, const State& a) { return {s * a[0], s * a[1], s * a[2], s * a[3]}; }

double norm2(const State& y) {
  return std::norm(y[0]) + std::norm(y[1]) + std::norm(y[2]) + std::norm(y[3]);
}

}  // namespace

DriveEnvelope::DriveEnvelope(Shape shape) : shape_(std::move(shape)) {
  if (const auto* g = std::get_if<GaussianDrive>(&shape_); g && !(g->width > 0.0))
    throw ConfigError(ConfigErrc::non_positive, "width", "Gaussian drive width must be > 0");
}

cplx DriveEnvelope::value(double t) const {
  return std::visit(
      overloaded{
          [](const ConstantDrive& d) { return d.amplitude; },
          [t](const RampDrive& d) { return d.slope * (t - d.origin); },
          [t](const GaussianDrive& d) {
            const double x = (t - d.center) / d.width;
            return d.amplitude * std::exp(-0.5 * x * x);
          },
      },
      shape_);
}

cplx DriveEnvelope::derivative(double t) const {
  return std::visit(
      overloaded{
          [](const ConstantDrive&) { return cplx{}; },
          [](const RampDrive& d) { return d.slope; },
          [t](const GaussianDrive& d) {
            const double x = (t - d.center) / d.width;
            return -x / d.width * d.amplitude * std::exp(-0.5 * x * x);
          },
      },
      shape_);
}

std::optional<double> DriveEnvelope::timescale() const {
  if (const auto* g = std::get_if<GaussianDrive>(&shape_)) return g->width;
  return std::nullopt;
}

bool DriveEnvelope::is_zero() const {
  return std::visit(overloaded{
                        [](const ConstantDrive& d) { return d.amplitude == cplx{}; },
                        [](const RampDrive& d) { return d.slope == cplx{}; },
                        [](const GaussianDrive& d) { return d.amplitude == cplx{}; },
                    },
                    shape_);
}

DriveEnvelope DriveEnvelope::scaled(cplx factor) const {
  return std::visit(overloaded{
                        [&](ConstantDrive d) -> DriveEnvelope {
                          d.amplitude *= factor;
                          return DriveEnvelope(d);
                        },
                        [&](RampDrive d) -> DriveEnvelope {
                          d.slope *= factor;
                          return DriveEnvelope(d);
                        },
                        [&](GaussianDrive d) -> DriveEnvelope {
                          d.amplitude *= factor;
                          return DriveEnvelope(d);
                        },
                    },
                    shape_);
}

double probe_coupling(const ExperimentConfig& config) {
  return config.dipole_mu * std::sqrt(static_cast<double>(config.atoms_per_site_N)) /
         constants::hbar;
}

cplx zeroth_order_q(const ExperimentConfig& config, cplx field) {
  return -probe_coupling(config) * field / config.control_rabi_Omega0;
}

cplx first_order_e(const ExperimentConfig& config, cplx field_rate) {
  const double omega = config.control_rabi_Omega0;
  return I * probe_coupling(config) * field_rate / (omega * omega);
}

SiteTrajectory integrate_site(const ExperimentConfig& config, const DriveProfile& drive,
                              const IntegrationSettings& settings) {
  if (!(settings.dt > 0.0))
    throw ConfigError(ConfigErrc::non_positive, "dt", "time step must be > 0");
  if (!(settings.t_end > settings.t_start))
    throw ConfigError(ConfigErrc::invalid_argument, "t_end", "t_end must exceed t_start");
  if (settings.record_stride == 0)
    throw ConfigError(ConfigErrc::invalid_argument, "record_stride", "stride must be >= 1");

  const double alpha = probe_coupling(config);
  const cplx omega0 = config.control_rabi_Omega0;
  const double span = settings.t_end - settings.t_start;
  const auto steps = static_cast<std::size_t>(std::ceil(span / settings.dt - 1e-9));
  const double h = span / static_cast<double>(steps);
  const double sqrtN = std::sqrt(static_cast<double>(config.atoms_per_site_N));

  const auto rhs = [&](double t, const State& y) -> State {
    const cplx drive_p = I * alpha * drive.plus.value(t);
    const cplx drive_m = I * alpha * drive.minus.value(t);
    return {drive_p + I * omega0 * y[2], drive_m + I * omega0 * y[3],
            I * std::conj(omega0) * y[0], I * std::conj(omega0) * y[1]};
  };
  const auto drive_strength = [&](double t) {
    return alpha * std::hypot(std::abs(drive.plus.value(t)), std::abs(drive.minus.value(t)));
  };

  State y{};
  if (settings.initial == InitialState::adiabatic) {
    const double t0 = settings.t_start;
    y = {first_order_e(config, drive.plus.derivative(t0)),
         first_order_e(config, drive.minus.derivative(t0)),
         zeroth_order_q(config, drive.plus.value(t0)),
         zeroth_order_q(config, drive.minus.value(t0))};
  }

  SiteTrajectory out;
  out.samples.reserve(steps / settings.record_stride + 2);
  const auto record = [&](double t) {
    out.samples.push_back({t, cplx{sqrtN, 0.0}, y[0], y[1], y[2], y[3]});
    out.max_excited_fraction = std::max(
        out.max_excited_fraction, norm2(y) / static_cast<double>(config.atoms_per_site_N));
  };
  record(settings.t_start);

  // The exact solution obeys d|y|/dt <= alpha |E(t)|; a numerical norm
  // outgrowing that envelope means the step is outside the stable range.
  double bound = std::sqrt(norm2(y));
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = settings.t_start + h * static_cast<double>(n);
    const State k1 = rhs(t, y);
    const State k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1);
    const State k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2);
    const State k4 = rhs(t + h, y + h * k3);
    y = y + (h / 6.0) * (k1 + (2.0 * k2) + (2.0 * k3) + k4);

    bound += h * std::max({drive_strength(t), drive_strength(t + 0.5 * h), drive_strength(t + h)});
    const double size = std::sqrt(norm2(y));
    if (!std::isfinite(size) || size > 1.05 * bound + std::numeric_limits<double>::min()) {
      std::ostringstream msg;
      msg << "site integration diverged at t = " << t + h << " (|Omega0| dt = "
          << std::abs(omega0) * h << "); reduce dt";
      throw NumericalError(NumericalErrc::step_size_divergence, msg.str());
    }
    if ((n + 1) % settings.record_stride == 0 || n + 1 == steps) record(t + h);
  }
  out.weak_probe_ok = out.max_excited_fraction < weak_probe_limit;
  return out;
}

AdiabaticResidual adiabatic_residual(const SiteTrajectory& trajectory, const DriveProfile& drive,
                                     const ExperimentConfig& config,
                                     std::optional<double> transient_window) {
  if (trajectory.samples.empty())
    throw NumericalError(NumericalErrc::empty_input, "adiabatic_residual: empty trajectory");
  const double omega_abs = std::abs(config.control_rabi_Omega0);
  const double window = transient_window.value_or(10.0 / omega_abs);
  const double t_cut = trajectory.samples.front().t + window;

  AdiabaticResidual r;
  r.q_series.reserve(trajectory.samples.size());
  r.e_series.reserve(trajectory.samples.size());
  for (const auto& s : trajectory.samples) {
    const cplx q0p = zeroth_order_q(config, drive.plus.value(s.t));
    const cplx q0m = zeroth_order_q(config, drive.minus.value(s.t));
    const cplx e1p = first_order_e(config, drive.plus.derivative(s.t));
    const cplx e1m = first_order_e(config, drive.minus.derivative(s.t));
    const double dq = std::max(std::abs(s.q_plus - q0p), std::abs(s.q_minus - q0m));
    const double de = std::max(std::abs(s.e_plus - e1p), std::abs(s.e_minus - e1m));
    r.q_series.push_back(dq);
    r.e_series.push_back(de);
    if (s.t < t_cut) continue;
    r.q_abs = std::max(r.q_abs, dq);
    r.e_abs = std::max(r.e_abs, de);
    r.e_zeroth_abs = std::max({r.e_zeroth_abs, std::abs(s.e_plus), std::abs(s.e_minus)});
    r.q_scale = std::max({r.q_scale, std::abs(q0p), std::abs(q0m)});
  }
  const auto relative = [&](double x) {
    if (x == 0.0) return 0.0;
    return r.q_scale > 0.0 ? x / r.q_scale : std::numeric_limits<double>::infinity();
  };
  r.q_rel = relative(r.q_abs);
  r.e_rel = relative(r.e_abs);
  r.e_zeroth_rel = relative(r.e_zeroth_abs);

  std::optional<double> tau;
  for (const auto* env : {&drive.plus, &drive.minus}) {
    if (env->is_zero()) continue;
    if (auto ts = env->timescale()) tau = tau ? std::min(*tau, *ts) : *ts;
  }
  r.eta = tau ? 1.0 / (omega_abs * *tau) : 0.0;
  return r;
}

void write_trajectory_csv(std::ostream& out, const SiteTrajectory& trajectory,
                          const AdiabaticResidual& residual) {
  out << "t,re_e_plus,im_e_plus,re_e_minus,im_e_minus,re_q_plus,im_q_plus,re_q_minus,im_q_minus,"
         "q_residual,e_residual\n";
  for (std::size_t i = 0; i < trajectory.samples.size(); ++i) {
    const auto& s = trajectory.samples[i];
    out << format_number(s.t);
    for (const cplx v : {s.e_plus, s.e_minus, s.q_plus, s.q_minus})
      out << ',' << format_number(v.real()) << ',' << format_number(v.imag());
    out << ',' << format_number(i < residual.q_series.size() ? residual.q_series[i] : 0.0) << ','
        << format_number(i < residual.e_series.size() ? residual.e_series[i] : 0.0) << '\n';
  }
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ConfigError(ConfigErrc::invalid_argument, "", "log_log_slope needs >= 2 paired points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace polariton::site
