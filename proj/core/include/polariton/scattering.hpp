#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <variant>
#include <vector>

#include "polariton/dispersion.hpp"

namespace polariton::scattering {

using cplx = std::complex<double>;

/// Uniformly spaced, strictly increasing sample positions.
class UniformAxis {
 public:
  UniformAxis() = default;
  /// `points` samples from `lo` to `hi` inclusive.
  static UniformAxis spanning(double lo, double hi, std::size_t points);

  double at(std::size_t i) const noexcept { return min_ + step_ * static_cast<double>(i); }
  double min() const noexcept { return min_; }
  double max() const noexcept { return at(size_ - 1); }
  double step() const noexcept { return step_; }
  std::size_t size() const noexcept { return size_; }

  bool operator==(const UniformAxis&) const = default;

 private:
  double min_{};
  double step_{1.0};
  std::size_t size_{};
};

/// Pair amplitude w(R, xi, t) on a uniform grid, R-major storage.
struct TwoParticleWave {
  UniformAxis R;
  UniformAxis xi;
  std::vector<cplx> amplitude;
  double t{};

  TwoParticleWave() = default;
  TwoParticleWave(UniformAxis r_axis, UniformAxis xi_axis, double time = 0.0);

  cplx& at(std::size_t iR, std::size_t ixi) { return amplitude[iR * xi.size() + ixi]; }
  const cplx& at(std::size_t iR, std::size_t ixi) const {
    return amplitude[iR * xi.size() + ixi];
  }

  /// Integral of |w|^2 dR dxi (rectangle rule).
  double norm() const;
  /// Norm-weighted mean of R.
  double center_of_mass() const;
  /// Fraction of the norm on xi > 0.
  double transmitted_fraction() const;
  /// Fraction of the norm in the `cells` outermost xi columns on each side.
  double boundary_fraction(std::size_t cells) const;
};

/// Normalized Gaussian: phi(z) = (pi w^2)^(-1/4) exp(-(z - z0)^2 / (2 w^2)).
/// The intensity |phi|^2 then has rms width w / sqrt(2).
struct GaussianPulse {
  double center{};
  double width{};
};

/// Complex profile sampled at strictly increasing z, linearly interpolated
/// and zero outside. Normalized to unit L2 norm (trapezoid rule) on use.
struct SampledPulse {
  std::vector<double> z;
  std::vector<cplx> values;
};

using PulseEnvelope = std::variant<GaussianPulse, SampledPulse>;

/// Product state w(z, z', 0) = phi_+(z) phi_-(z') evaluated in
/// R = (z + z')/2, xi = z - z'.
class InitialCondition {
 public:
  InitialCondition(PulseEnvelope plus, PulseEnvelope minus);

  cplx operator()(double R, double xi) const;
  TwoParticleWave sample(const UniformAxis& R, const UniformAxis& xi) const;

  /// Representative envelope width (the larger of the two).
  double envelope_width() const;
  /// xi of the envelope centers, z_+ - z_-.
  double initial_separation() const;
  double center_of_mass() const;

 private:
  cplx envelope(const PulseEnvelope& env, double scale, double z) const;

  PulseEnvelope plus_;
  PulseEnvelope minus_;
  double scale_plus_{1.0};
  double scale_minus_{1.0};
};

/// Default grid: xi in [-20 s, 20 s] x R in [-5 s, 5 s] around the center of
/// mass for envelope width s, 2048 x 64 points.
struct GridSpec {
  std::size_t xi_points = 2048;
  std::size_t R_points = 64;
  double xi_half_width{};
  double R_half_width{};
  double R_center{};

  static GridSpec defaults_for(double envelope_width, double R_center = 0.0);
  UniformAxis xi_axis() const;
  UniformAxis R_axis() const;
};

/// Exact solution of the transport equation along characteristics:
///   w(R, xi, t) = w0(R, xi - 2 v_gr t) exp(-i dphi [H(xi) - H(xi - 2 v_gr t)])
/// with H(0) = 1/2. For incoming data (support in xi < 0) this is the
/// translated initial state times exp(-i dphi H(xi)).
/// Throws NumericalError(support_left_grid) if norm is lost off the grid.
TwoParticleWave evolve_characteristics(const InitialCondition& initial, const UniformAxis& R,
                                       const UniformAxis& xi, const EitMedium& medium,
                                       double t);

/// Same on sampled data, shifted with linear interpolation in xi (exact
/// when 2 v_gr t is a multiple of the grid step).
TwoParticleWave evolve_characteristics(const TwoParticleWave& initial, const EitMedium& medium,
                                       double t);

/// Unit-mass Gaussian standing in for delta(xi).
double regularized_delta(double xi, double epsilon) noexcept;

/// max(3 dxi, envelope_width / 50).
double default_regularization(double dxi, double envelope_width) noexcept;

struct FdSettings {
  double dt{};
  double epsilon{};
  unsigned threads{0};  // 0: hardware concurrency
};

/// First-order upwind in xi with the delta replaced by regularized_delta;
/// the interaction is integrated exactly per step (Lie splitting). Each R
/// slice evolves independently. Requires 2 v_gr dt / dxi <= 1 and
/// epsilon >= 3 dxi.
TwoParticleWave evolve_fd(const TwoParticleWave& initial, const EitMedium& medium, double t,
                          const FdSettings& settings);

/// Amplitude factor exp(-2 gamma_q sin^2(theta) elapsed).
double dephasing_factor(const MixingAngle& theta, double gamma_q, double elapsed);
TwoParticleWave apply_dephasing(TwoParticleWave w, const EitMedium& medium, double gamma_q,
                                double elapsed);

struct PhaseMeasurement {
  double delta_phi{};    // circular mean, in (-pi, pi]
  double homogeneity{};  // circular standard deviation
  std::size_t support_points{};
  double transmitted_fraction{};
};

inline constexpr double required_transmission = 0.999;
inline constexpr double support_threshold = 1e-3;

/// Compares `final_state` with `initial` translated by 2 v_gr t on every
/// point where |w_final| exceeds support_threshold of its peak. The phase
/// returned is the conditional phase dphi, i.e. minus the argument of
/// w_final * conj(w_initial(xi - 2 v_gr t)).
PhaseMeasurement extract_phase(const TwoParticleWave& initial, const TwoParticleWave& final_state,
                               double v_gr, double t);

/// Relative L2 distance |a - b| / |b| on a common grid.
double relative_l2_distance(const TwoParticleWave& a, const TwoParticleWave& b);

/// Columns t, R, xi, re_w, im_w, abs_w, phase_w, one row per grid point.
void write_snapshot_csv(std::ostream& out, const TwoParticleWave& w);

}  // namespace polariton::scattering
