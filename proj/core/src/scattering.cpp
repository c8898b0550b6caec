#include "polariton/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "polariton/constants.hpp"
#include "polariton/errors.hpp"
#include "polariton/format.hpp"

namespace polariton::scattering {

namespace {

constexpr cplx I{0.0, 1.0};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Heaviside step with H(0) = 1/2.
double step(double x) noexcept {
  if (x > 0.0) return 1.0;
  if (x < 0.0) return 0.0;
  return 0.5;
}

void require_same_grid(const TwoParticleWave& a, const TwoParticleWave& b, const char* where) {
  if (!(a.R == b.R) || !(a.xi == b.xi))
    throw NumericalError(NumericalErrc::invalid_grid, std::string(where) + ": grids differ");
}

// Boundary strip checked for outflow: 1% of the xi columns, at least one.
std::size_t boundary_cells(const UniformAxis& xi) { return std::max<std::size_t>(1, xi.size() / 100); }

constexpr double outflow_tolerance = 1e-6;

// exp(-x^2/2) < 2e-22 outside |xi| <= 10 epsilon.
constexpr double kick_band = 10.0;

// Plain product; std::complex operator* adds NaN recovery we do not need.
inline cplx multiply(cplx a, cplx b) noexcept {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// Repeated damping by (1 - c) drives far tails into subnormal range, which
// is very slow on x86; anything this small is zero for our purposes.
void flush_tiny(cplx* row, std::size_t n) noexcept {
  auto* v = reinterpret_cast<double*>(row);
  for (std::size_t i = 0; i < 2 * n; ++i)
    if (std::abs(v[i]) < 1e-200) v[i] = 0.0;
}

// One upwind step for positive speed with zero inflow, in place.
void advect_upwind(cplx* row, std::size_t n, double c) noexcept {
  auto* v = reinterpret_cast<double*>(row);
  const double keep = 1.0 - c;
  for (std::size_t i = n - 1; i > 0; --i) {
    v[2 * i] = keep * v[2 * i] + c * v[2 * i - 2];
    v[2 * i + 1] = keep * v[2 * i + 1] + c * v[2 * i - 1];
  }
  v[0] *= keep;
  v[1] *= keep;
}

void check_support(const TwoParticleWave& w, double reference_norm, const char* where) {
  const double edge = w.boundary_fraction(boundary_cells(w.xi));
  const double lost = reference_norm > 0.0 ? 1.0 - w.norm() / reference_norm : 0.0;
  if (edge > outflow_tolerance || lost > outflow_tolerance) {
    std::ostringstream msg;
    msg << where << ": " << std::max(edge, lost) << " of the norm has reached or left the xi-grid "
        << "boundary at t = " << w.t << "; widen the xi grid";
    throw NumericalError(NumericalErrc::support_left_grid, msg.str());
  }
}

// Linear interpolation of row `iR` at position `x`; exact on grid points.
cplx interpolate_xi(const TwoParticleWave& w, std::size_t iR, double x) {
  const double s = (x - w.xi.min()) / w.xi.step();
  const double nearest = std::round(s);
  const auto last = static_cast<double>(w.xi.size() - 1);
  if (std::abs(s - nearest) < 1e-9) {
    if (nearest < 0.0 || nearest > last) return {};
    return w.at(iR, static_cast<std::size_t>(nearest));
  }
  if (s < 0.0 || s > last) return {};
  const auto i0 = static_cast<std::size_t>(std::floor(s));
  const double frac = s - static_cast<double>(i0);
  return (1.0 - frac) * w.at(iR, i0) + frac * w.at(iR, i0 + 1);
}

void validate_time(double t) {
  if (!(t >= 0.0)) throw ConfigError(ConfigErrc::invalid_argument, "t", "time must be >= 0");
}

template <typename F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned k = 0; k < threads; ++k) {
    pool.emplace_back([&, k] {
      for (std::size_t i = k; i < count; i += threads) body(i);
    });
  }
}

}  // namespace

UniformAxis UniformAxis::spanning(double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw NumericalError(NumericalErrc::invalid_grid,
                         "axis needs >= 2 points and a strictly increasing range");
  UniformAxis axis;
  axis.min_ = lo;
  axis.step_ = (hi - lo) / static_cast<double>(points - 1);
  axis.size_ = points;
  return axis;
}

TwoParticleWave::TwoParticleWave(UniformAxis r_axis, UniformAxis xi_axis, double time)
    : R(r_axis), xi(xi_axis), amplitude(r_axis.size() * xi_axis.size()), t(time) {}

double TwoParticleWave::norm() const {
  double sum = 0.0;
  for (const cplx& v : amplitude) sum += std::norm(v);
  return sum * R.step() * xi.step();
}

double TwoParticleWave::center_of_mass() const {
  double weighted = 0.0, total = 0.0;
  for (std::size_t iR = 0; iR < R.size(); ++iR) {
    double row = 0.0;
    for (std::size_t ix = 0; ix < xi.size(); ++ix) row += std::norm(at(iR, ix));
    weighted += R.at(iR) * row;
    total += row;
  }
  return total > 0.0 ? weighted / total : 0.0;
}

double TwoParticleWave::transmitted_fraction() const {
  double positive = 0.0, total = 0.0;
  for (std::size_t iR = 0; iR < R.size(); ++iR) {
    for (std::size_t ix = 0; ix < xi.size(); ++ix) {
      const double p = std::norm(at(iR, ix));
      total += p;
      if (xi.at(ix) > 0.0) positive += p;
    }
  }
  return total > 0.0 ? positive / total : 0.0;
}

double TwoParticleWave::boundary_fraction(std::size_t cells) const {
  cells = std::min(cells, xi.size() / 2);
  double edge = 0.0, total = 0.0;
  for (std::size_t iR = 0; iR < R.size(); ++iR) {
    for (std::size_t ix = 0; ix < xi.size(); ++ix) {
      const double p = std::norm(at(iR, ix));
      total += p;
      if (ix < cells || ix + cells >= xi.size()) edge += p;
    }
  }
  return total > 0.0 ? edge / total : 0.0;
}

InitialCondition::InitialCondition(PulseEnvelope plus, PulseEnvelope minus)
    : plus_(std::move(plus)), minus_(std::move(minus)) {
  const auto scale_of = [](const PulseEnvelope& env) {
    return std::visit(
        overloaded{
            [](const GaussianPulse& g) {
              if (!(g.width > 0.0))
                throw ConfigError(ConfigErrc::non_positive, "width",
                                  "pulse width must be > 0");
              return std::pow(constants::pi * g.width * g.width, -0.25);
            },
            [](const SampledPulse& s) {
              if (s.z.size() < 2 || s.z.size() != s.values.size())
                throw ConfigError(ConfigErrc::invalid_argument, "z",
                                  "sampled pulse needs >= 2 matching z / value samples");
              double integral = 0.0;
              for (std::size_t i = 1; i < s.z.size(); ++i) {
                if (!(s.z[i] > s.z[i - 1]))
                  throw ConfigError(ConfigErrc::invalid_argument, "z",
                                    "sampled pulse positions must increase strictly");
                integral += 0.5 * (s.z[i] - s.z[i - 1]) *
                            (std::norm(s.values[i]) + std::norm(s.values[i - 1]));
              }
              if (!(integral > 0.0))
                throw ConfigError(ConfigErrc::invalid_argument, "values",
                                  "sampled pulse has zero norm");
              return 1.0 / std::sqrt(integral);
            },
        },
        env);
  };
  scale_plus_ = scale_of(plus_);
  scale_minus_ = scale_of(minus_);
}

cplx InitialCondition::envelope(const PulseEnvelope& env, double scale, double z) const {
  return std::visit(overloaded{
                        [&](const GaussianPulse& g) -> cplx {
                          const double x = (z - g.center) / g.width;
                          return scale * std::exp(-0.5 * x * x);
                        },
                        [&](const SampledPulse& s) -> cplx {
                          if (z < s.z.front() || z > s.z.back()) return {};
                          const auto hi = std::upper_bound(s.z.begin(), s.z.end(), z);
                          if (hi == s.z.end()) return scale * s.values.back();
                          const auto i = static_cast<std::size_t>(hi - s.z.begin());
                          const double frac = (z - s.z[i - 1]) / (s.z[i] - s.z[i - 1]);
                          return scale * ((1.0 - frac) * s.values[i - 1] + frac * s.values[i]);
                        },
                    },
                    env);
}

cplx InitialCondition::operator()(double R, double xi) const {
  return envelope(plus_, scale_plus_, R + 0.5 * xi) * envelope(minus_, scale_minus_, R - 0.5 * xi);
}

TwoParticleWave InitialCondition::sample(const UniformAxis& R, const UniformAxis& xi) const {
  TwoParticleWave w(R, xi, 0.0);
  for (std::size_t iR = 0; iR < R.size(); ++iR)
    for (std::size_t ix = 0; ix < xi.size(); ++ix) w.at(iR, ix) = (*this)(R.at(iR), xi.at(ix));
  return w;
}

namespace {

struct Moments {
  double mean;
  double width;  // Gaussian-equivalent width parameter, sqrt(2) * rms of |phi|^2
};

Moments moments(const PulseEnvelope& env) {
  return std::visit(overloaded{
                        [](const GaussianPulse& g) { return Moments{g.center, g.width}; },
                        [](const SampledPulse& s) {
                          double m0 = 0, m1 = 0, m2 = 0;
                          for (std::size_t i = 1; i < s.z.size(); ++i) {
                            const double dz = s.z[i] - s.z[i - 1];
                            for (std::size_t j : {i - 1, i}) {
                              const double p = 0.5 * dz * std::norm(s.values[j]);
                              m0 += p;
                              m1 += p * s.z[j];
                              m2 += p * s.z[j] * s.z[j];
                            }
                          }
                          const double mean = m1 / m0;
                          const double var = std::max(0.0, m2 / m0 - mean * mean);
                          return Moments{mean, std::sqrt(2.0 * var)};
                        },
                    },
                    env);
}

}  // namespace

double InitialCondition::envelope_width() const {
  return std::max(moments(plus_).width, moments(minus_).width);
}

double InitialCondition::initial_separation() const {
  return moments(plus_).mean - moments(minus_).mean;
}

double InitialCondition::center_of_mass() const {
  return 0.5 * (moments(plus_).mean + moments(minus_).mean);
}

GridSpec GridSpec::defaults_for(double envelope_width, double R_center) {
  GridSpec spec;
  spec.xi_half_width = 20.0 * envelope_width;
  spec.R_half_width = 5.0 * envelope_width;
  spec.R_center = R_center;
  return spec;
}

UniformAxis GridSpec::xi_axis() const {
  return UniformAxis::spanning(-xi_half_width, xi_half_width, xi_points);
}

UniformAxis GridSpec::R_axis() const {
  return UniformAxis::spanning(R_center - R_half_width, R_center + R_half_width, R_points);
}

TwoParticleWave evolve_characteristics(const InitialCondition& initial, const UniformAxis& R,
                                       const UniformAxis& xi, const EitMedium& medium,
                                       double t) {
  validate_time(t);
  const double shift = 2.0 * medium.v_gr * t;
  const double dphi = medium.collision_phase();
  TwoParticleWave w(R, xi, t);
  for (std::size_t ix = 0; ix < xi.size(); ++ix) {
    const double x = xi.at(ix);
    const double source = x - shift;
    const cplx phase = std::exp(-I * dphi * (step(x) - step(source)));
    for (std::size_t iR = 0; iR < R.size(); ++iR) w.at(iR, ix) = initial(R.at(iR), source) * phase;
  }
  check_support(w, initial.sample(R, xi).norm(), "evolve_characteristics");
  return w;
}

TwoParticleWave evolve_characteristics(const TwoParticleWave& initial, const EitMedium& medium,
                                       double t) {
  validate_time(t);
  const double shift = 2.0 * medium.v_gr * t;
  const double dphi = medium.collision_phase();
  TwoParticleWave w(initial.R, initial.xi, initial.t + t);
  for (std::size_t ix = 0; ix < w.xi.size(); ++ix) {
    const double x = w.xi.at(ix);
    const double source = x - shift;
    const cplx phase = std::exp(-I * dphi * (step(x) - step(source)));
    for (std::size_t iR = 0; iR < w.R.size(); ++iR)
      w.at(iR, ix) = interpolate_xi(initial, iR, source) * phase;
  }
  check_support(w, initial.norm(), "evolve_characteristics");
  return w;
}

double regularized_delta(double xi, double epsilon) noexcept {
  const double x = xi / epsilon;
  return std::exp(-0.5 * x * x) / (std::sqrt(2.0 * constants::pi) * epsilon);
}

double default_regularization(double dxi, double envelope_width) noexcept {
  return std::max(3.0 * dxi, envelope_width / 50.0);
}

TwoParticleWave evolve_fd(const TwoParticleWave& initial, const EitMedium& medium, double t,
                          const FdSettings& settings) {
  validate_time(t);
  if (!(settings.dt > 0.0))
    throw ConfigError(ConfigErrc::non_positive, "dt", "time step must be > 0");
  const double dxi = initial.xi.step();
  const double speed = 2.0 * medium.v_gr;
  const double courant = speed * settings.dt / dxi;
  if (courant > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "CFL violated: 2 v_gr dt / dxi = " << courant << " > 1; use dt <= " << dxi / speed;
    throw NumericalError(NumericalErrc::cfl_violation, msg.str());
  }
  if (settings.epsilon < 3.0 * dxi * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "regularization width epsilon = " << settings.epsilon << " < 3 dxi; use epsilon >= "
        << 3.0 * dxi;
    throw NumericalError(NumericalErrc::under_resolved_regularization, msg.str());
  }

  TwoParticleWave w = initial;
  w.t = initial.t + t;
  if (t == 0.0) return w;

  // Full steps at the requested dt, then one shorter step to land on t, so
  // the Courant number of the bulk of the run is exactly the requested one.
  auto full_steps = static_cast<std::size_t>(std::floor(t / settings.dt));
  double remainder = t - static_cast<double>(full_steps) * settings.dt;
  if (remainder < 1e-9 * settings.dt) {
    remainder = 0.0;
  } else if (settings.dt - remainder < 1e-9 * settings.dt) {
    ++full_steps;
    remainder = 0.0;
  }
  const std::size_t nx = w.xi.size();

  // The kick differs from 1 only where the regularized delta is non-negligible.
  std::size_t band_lo = nx, band_hi = 0;
  for (std::size_t ix = 0; ix < nx; ++ix) {
    if (std::abs(w.xi.at(ix)) <= kick_band * settings.epsilon) {
      band_lo = std::min(band_lo, ix);
      band_hi = ix + 1;
    }
  }
  const auto kicks_for = [&](double h) {
    std::vector<cplx> kick;
    for (std::size_t ix = band_lo; ix < band_hi; ++ix)
      kick.push_back(std::exp(-I * medium.kappa_cross *
                              regularized_delta(w.xi.at(ix), settings.epsilon) * h));
    return kick;
  };
  const std::vector<cplx> kick = kicks_for(settings.dt);
  const std::vector<cplx> last_kick = kicks_for(remainder);
  const double c_last = speed * remainder / dxi;

  std::vector<double> outflow(w.R.size(), 0.0);
  parallel_for(w.R.size(), settings.threads, [&](std::size_t iR) {
    cplx* row = w.amplitude.data() + iR * nx;
    double lost = 0.0;
    const auto advance = [&](double c, const std::vector<cplx>& k) {
      lost += c * std::norm(row[nx - 1]);
      advect_upwind(row, nx, c);
      for (std::size_t j = 0; j < k.size(); ++j) row[band_lo + j] = multiply(row[band_lo + j], k[j]);
    };
    for (std::size_t n = 0; n < full_steps; ++n) {
      advance(courant, kick);
      if (n % 64 == 63) flush_tiny(row, nx);
    }
    if (remainder > 0.0) advance(c_last, last_kick);
    outflow[iR] = lost;
  });

  const double lost = std::accumulate(outflow.begin(), outflow.end(), 0.0) * w.R.step() * dxi;
  const double reference = initial.norm();
  if (reference > 0.0 && lost / reference > outflow_tolerance) {
    std::ostringstream msg;
    msg << "evolve_fd: " << lost / reference << " of the norm left through the xi boundary";
    throw NumericalError(NumericalErrc::support_left_grid, msg.str());
  }
  // Upwind damping lowers the norm by itself; outflow is accounted above.
  check_support(w, 0.0, "evolve_fd");
  return w;
}

double dephasing_factor(const MixingAngle& theta, double gamma_q, double elapsed) {
  if (!(gamma_q >= 0.0))
    throw ConfigError(ConfigErrc::invalid_argument, "gamma_q", "dephasing rate must be >= 0");
  if (!(elapsed >= 0.0))
    throw ConfigError(ConfigErrc::invalid_argument, "t", "elapsed time must be >= 0");
  return std::exp(-2.0 * gamma_q * theta.sin2() * elapsed);
}

TwoParticleWave apply_dephasing(TwoParticleWave w, const EitMedium& medium, double gamma_q,
                                double elapsed) {
  const double factor = dephasing_factor(medium.theta, gamma_q, elapsed);
  if (factor != 1.0)
    for (cplx& v : w.amplitude) v *= factor;
  return w;
}

PhaseMeasurement extract_phase(const TwoParticleWave& initial, const TwoParticleWave& final_state,
                               double v_gr, double t) {
  if (!(initial.R == final_state.R))
    throw NumericalError(NumericalErrc::invalid_grid, "extract_phase: R grids differ");
  if (final_state.amplitude.empty() || initial.amplitude.empty())
    throw NumericalError(NumericalErrc::empty_input, "extract_phase: empty wave function");

  PhaseMeasurement m;
  m.transmitted_fraction = final_state.transmitted_fraction();
  if (m.transmitted_fraction < required_transmission) {
    std::ostringstream msg;
    msg << "extract_phase: only " << m.transmitted_fraction
        << " of the norm is on xi > 0; evolve further before measuring";
    throw NumericalError(NumericalErrc::not_transmitted, msg.str());
  }

  double peak = 0.0;
  for (const cplx& v : final_state.amplitude) peak = std::max(peak, std::abs(v));
  const double cutoff = support_threshold * peak;
  const double shift = 2.0 * v_gr * t;

  struct Sample {
    double weight;
    double angle;
  };
  std::vector<Sample> samples;
  cplx resultant{};
  double total = 0.0;
  for (std::size_t iR = 0; iR < final_state.R.size(); ++iR) {
    for (std::size_t ix = 0; ix < final_state.xi.size(); ++ix) {
      const cplx wf = final_state.at(iR, ix);
      if (!(std::abs(wf) > cutoff)) continue;
      const cplx wi = interpolate_xi(initial, iR, final_state.xi.at(ix) - shift);
      if (wi == cplx{}) continue;
      const cplx z = wf * std::conj(wi);
      const double weight = std::norm(wf);
      const double angle = std::arg(z);
      samples.push_back({weight, angle});
      resultant += weight * std::polar(1.0, angle);
      total += weight;
    }
  }
  if (samples.empty() || std::abs(resultant) == 0.0)
    throw NumericalError(NumericalErrc::insufficient_support,
                         "extract_phase: no overlap between final and translated initial support");

  const double mean = std::arg(resultant);
  // 1 - Rbar accumulated as sum of 2 sin^2(d/2): no cancellation for small spreads.
  double spread = 0.0;
  for (const auto& s : samples) {
    const double half = 0.5 * std::remainder(s.angle - mean, 2.0 * constants::pi);
    spread += s.weight * 2.0 * std::sin(half) * std::sin(half);
  }
  const double one_minus_rbar = std::min(spread / total, 1.0 - 1e-300);
  m.homogeneity = std::sqrt(-2.0 * std::log1p(-one_minus_rbar));
  m.delta_phi = -mean;
  if (m.delta_phi <= -constants::pi) m.delta_phi += 2.0 * constants::pi;
  m.support_points = samples.size();
  return m;
}

double relative_l2_distance(const TwoParticleWave& a, const TwoParticleWave& b) {
  require_same_grid(a, b, "relative_l2_distance");
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < a.amplitude.size(); ++i) {
    diff += std::norm(a.amplitude[i] - b.amplitude[i]);
    ref += std::norm(b.amplitude[i]);
  }
  return ref > 0.0 ? std::sqrt(diff / ref) : std::sqrt(diff);
}

void write_snapshot_csv(std::ostream& out, const TwoParticleWave& w) {
  out << "t,R,xi,re_w,im_w,abs_w,phase_w\n";
  const std::string t = format_number(w.t);
  for (std::size_t iR = 0; iR < w.R.size(); ++iR) {
    const std::string r = format_number(w.R.at(iR));
    for (std::size_t ix = 0; ix < w.xi.size(); ++ix) {
      const cplx v = w.at(iR, ix);
      out << t << ',' << r << ',' << format_number(w.xi.at(ix)) << ',' << format_number(v.real())
          << ',' << format_number(v.imag()) << ',' << format_number(std::abs(v)) << ','
          << format_number(std::arg(v)) << '\n';
    }
  }
}

}  // namespace polariton::scattering
