#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "polariton/params.hpp"

namespace polariton::site {

using cplx = std::complex<double>;

struct ConstantDrive {
  cplx amplitude{};
};

/// E(t) = slope * (t - origin).
struct RampDrive {
  cplx slope{};
  double origin{};
};

/// E(t) = amplitude * exp(-(t - center)^2 / (2 width^2)).
struct GaussianDrive {
  cplx amplitude{};
  double center{};
  double width{};
};

/// Probe envelope (V/m) for one polarization.
class DriveEnvelope {
 public:
  using Shape = std::variant<ConstantDrive, RampDrive, GaussianDrive>;

  DriveEnvelope() : shape_(ConstantDrive{}) {}
  DriveEnvelope(Shape shape);  // NOLINT(google-explicit-constructor)
  template <class T>
    requires std::is_constructible_v<Shape, T>
  DriveEnvelope(T shape) : DriveEnvelope(Shape(std::move(shape))) {}  // NOLINT

  cplx value(double t) const;
  cplx derivative(double t) const;
  /// Pulse duration for Gaussian drives; none for constant / ramp.
  std::optional<double> timescale() const;
  bool is_zero() const;
  DriveEnvelope scaled(cplx factor) const;

  const Shape& shape() const noexcept { return shape_; }

 private:
  Shape shape_;
};

struct DriveProfile {
  DriveEnvelope plus;
  DriveEnvelope minus;
};

/// Slowly varying amplitudes at one lattice site.
struct SiteAmplitudes {
  double t{};
  cplx g{};
  cplx e_plus{};
  cplx e_minus{};
  cplx q_plus{};
  cplx q_minus{};
};

enum class InitialState {
  ground,     // e = q = 0
  adiabatic,  // q = q^(0)(t0), e = e^(1)(t0)
};

struct IntegrationSettings {
  double t_start{};
  double t_end{};
  double dt{};
  InitialState initial = InitialState::ground;
  std::size_t record_stride = 1;  // keep every n-th step (the last is always kept)
};

struct SiteTrajectory {
  std::vector<SiteAmplitudes> samples;
  double max_excited_fraction{};  // max (|e|^2 + |q|^2) / N
  bool weak_probe_ok{true};       // max_excited_fraction < weak_probe_limit
};

inline constexpr double weak_probe_limit = 0.01;

/// Probe coupling mu sqrt(N) / hbar (rad s^-1 per V/m).
double probe_coupling(const ExperimentConfig& config);

/// q^(0) = -mu sqrt(N) E / (hbar Omega0).
cplx zeroth_order_q(const ExperimentConfig& config, cplx field);
/// e^(1) = i mu sqrt(N) dE/dt / (hbar |Omega0|^2); e^(0) vanishes in the
/// linear regime.
cplx first_order_e(const ExperimentConfig& config, cplx field_rate);

/// Fixed-step RK4 integration of the resonant single-site equations
///   de/dt = i (mu sqrt(N)/hbar) E(t) + i Omega0 q
///   dq/dt = i Omega0^* e
/// for both polarizations. Throws NumericalError(step_size_divergence) when
/// the amplitude norm outgrows the bound the drive can supply.
SiteTrajectory integrate_site(const ExperimentConfig& config, const DriveProfile& drive,
                              const IntegrationSettings& settings);

struct AdiabaticResidual {
  // Max-norms over the post-transient window, absolute and relative to
  // max |q^(0)| over the same window.
  double q_abs{};
  double e_abs{};
  double e_zeroth_abs{};
  double q_rel{};
  double e_rel{};
  double e_zeroth_rel{};
  double q_scale{};
  double eta{};  // 1 / (|Omega0| tau_pulse), 0 without a pulse timescale
  // Per-sample residuals max_{+-}|q - q^(0)| and max_{+-}|e - e^(1)|.
  std::vector<double> q_series;
  std::vector<double> e_series;
};

/// `transient_window` defaults to 10 / |Omega0|.
AdiabaticResidual adiabatic_residual(const SiteTrajectory& trajectory,
                                     const DriveProfile& drive,
                                     const ExperimentConfig& config,
                                     std::optional<double> transient_window = std::nullopt);

/// Columns: t, re/im of e+, e-, q+, q-, q_residual, e_residual.
void write_trajectory_csv(std::ostream& out, const SiteTrajectory& trajectory,
                          const AdiabaticResidual& residual);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace polariton::site
