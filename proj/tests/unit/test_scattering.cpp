#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fixtures.hpp"
#include "polariton/dispersion.hpp"
#include "polariton/errors.hpp"
#include "polariton/scattering.hpp"

using namespace polariton;
using namespace polariton::scattering;
using polariton::testing::angle_diff;
using polariton::testing::reference_config;
using polariton::testing::rel_diff;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kWidth = 2e-6;  // L / 4 for L = 10 lambda

ExperimentConfig config_with_phase(double dphi) {
  ExperimentConfig cfg = reference_config();
  cfg.scattering_length_a_pm = oracle::a_pm_for_pi * dphi / kPi;
  return cfg;
}

InitialCondition colliding_pair() {
  return {GaussianPulse{-6.0 * kWidth, kWidth}, GaussianPulse{6.0 * kWidth, kWidth}};
}

struct Setup {
  EitMedium medium;
  InitialCondition ic = colliding_pair();
  UniformAxis R;
  UniformAxis xi;
  double t_cross{};

  explicit Setup(double dphi, std::size_t xi_points = 2048, std::size_t R_points = 64)
      : medium(make_medium(config_with_phase(dphi))) {
    GridSpec spec = GridSpec::defaults_for(ic.envelope_width(), ic.center_of_mass());
    spec.xi_points = xi_points;
    spec.R_points = R_points;
    R = spec.R_axis();
    xi = spec.xi_axis();
    t_cross = std::abs(ic.initial_separation()) / medium.v_gr;
  }
};

double heaviside(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? 0.0 : 0.5); }

double peak(const TwoParticleWave& w) {
  double p = 0.0;
  for (const cplx& v : w.amplitude) p = std::max(p, std::abs(v));
  return p;
}

FdSettings fd_settings(const Setup& s, double courant = 0.9995, double eps_factor = 3.0) {
  return {courant * s.xi.step() / (2.0 * s.medium.v_gr), eps_factor * s.xi.step(), 0};
}

}  // namespace

TEST_CASE("uniform axis") {
  const auto axis = UniformAxis::spanning(-1.0, 1.0, 5);
  CHECK(axis.step() == 0.5);
  CHECK(axis.at(4) == 1.0);
  CHECK(axis.max() == 1.0);
  CHECK_THROWS_AS(UniformAxis::spanning(0.0, 1.0, 1), NumericalError);
  CHECK_THROWS_AS(UniformAxis::spanning(1.0, 0.0, 10), NumericalError);
}

TEST_CASE("initial condition") {
  const Setup s(kPi);
  const auto w0 = s.ic.sample(s.R, s.xi);
  CHECK(w0.norm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(w0.transmitted_fraction() < 1e-12);
  CHECK(s.ic.initial_separation() == doctest::Approx(-12.0 * kWidth));
  CHECK(s.ic.envelope_width() == kWidth);

  SUBCASE("sampled envelopes are normalized on use") {
    SampledPulse p;
    for (int i = 0; i <= 400; ++i) {
      const double z = -10.0 * kWidth + i * kWidth / 20.0;
      p.z.push_back(z);
      p.values.push_back(3.0 * std::exp(-0.5 * z * z / (kWidth * kWidth)));
    }
    const InitialCondition sampled(p, GaussianPulse{12.0 * kWidth, kWidth});
    const auto spec = GridSpec::defaults_for(sampled.envelope_width(), sampled.center_of_mass());
    const auto ws = sampled.sample(spec.R_axis(), spec.xi_axis());
    CHECK(ws.norm() == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(sampled.envelope_width() == doctest::Approx(kWidth).epsilon(1e-3));
  }
  CHECK_THROWS_AS(InitialCondition(GaussianPulse{0.0, 0.0}, GaussianPulse{0.0, 1.0}),
                  ConfigError);
  CHECK_THROWS_AS(InitialCondition(SampledPulse{{0.0, 0.0}, {1.0, 1.0}}, GaussianPulse{0.0, 1.0}),
                  ConfigError);
}

TEST_CASE("characteristics: t = 0 is the identity") {
  const Setup s(1.25);
  const auto w0 = s.ic.sample(s.R, s.xi);
  const auto w = evolve_characteristics(s.ic, s.R, s.xi, s.medium, 0.0);
  CHECK(w.amplitude == w0.amplitude);
  const auto ws = evolve_characteristics(w0, s.medium, 0.0);
  CHECK(ws.amplitude == w0.amplitude);
}

TEST_CASE("characteristics: no interaction is a pure translation") {
  const Setup s(0.0);
  const double t = 0.6 * s.t_cross;
  const double shift = 2.0 * s.medium.v_gr * t;
  const auto w = evolve_characteristics(s.ic, s.R, s.xi, s.medium, t);
  double worst = 0.0;
  for (std::size_t iR = 0; iR < s.R.size(); ++iR)
    for (std::size_t ix = 0; ix < s.xi.size(); ++ix)
      worst = std::max(worst, std::abs(w.at(iR, ix) - s.ic(s.R.at(iR), s.xi.at(ix) - shift)));
  CHECK(worst == 0.0);
}

TEST_CASE("characteristics: full crossing at pi flips the sign") {
  const Setup s(kPi);
  CHECK(rel_diff(s.medium.collision_phase(), kPi) < 1e-12);
  const double shift = 2.0 * s.medium.v_gr * s.t_cross;
  const auto w = evolve_characteristics(s.ic, s.R, s.xi, s.medium, s.t_cross);
  const double scale = peak(w);
  double worst = 0.0;
  for (std::size_t iR = 0; iR < s.R.size(); ++iR) {
    for (std::size_t ix = 0; ix < s.xi.size(); ++ix) {
      const double x = s.xi.at(ix);
      const cplx expected = -s.ic(s.R.at(iR), x - shift);
      if (x > 0.0) worst = std::max(worst, std::abs(w.at(iR, ix) - expected));
    }
  }
  CHECK(worst <= 1e-12 * scale);
  CHECK(w.transmitted_fraction() > 1.0 - 1e-12);
}

TEST_CASE("characteristics: mid-collision state matches the closed form") {
  const Setup s(1.25);
  const double dphi = s.medium.collision_phase();
  for (double frac : {0.3, 0.5, 0.71}) {
    const double t = frac * s.t_cross;
    const double shift = 2.0 * s.medium.v_gr * t;
    const auto w = evolve_characteristics(s.ic, s.R, s.xi, s.medium, t);
    const double scale = peak(w);
    double worst = 0.0;
    for (std::size_t iR = 0; iR < s.R.size(); iR += 7) {
      for (std::size_t ix = 0; ix < s.xi.size(); ++ix) {
        const double x = s.xi.at(ix);
        const cplx expected = s.ic(s.R.at(iR), x - shift) *
                              std::polar(1.0, -dphi * (heaviside(x) - heaviside(x - shift)));
        worst = std::max(worst, std::abs(w.at(iR, ix) - expected));
      }
    }
    CHECK(worst <= 1e-12 * scale);
  }
}

TEST_CASE("characteristics: norm, shape and center of mass are invariant") {
  const Setup s(1.25);
  const auto w0 = s.ic.sample(s.R, s.xi);
  const double shift = 2.0 * s.medium.v_gr * s.t_cross;
  for (double frac : {0.25, 0.5, 1.0}) {
    const auto w = evolve_characteristics(s.ic, s.R, s.xi, s.medium, frac * s.t_cross);
    CHECK(rel_diff(w.norm(), w0.norm()) < 1e-13);
    CHECK(std::abs(w.center_of_mass() - w0.center_of_mass()) < 1e-14 * kWidth);
    double worst = 0.0;
    for (std::size_t iR = 0; iR < s.R.size(); iR += 5)
      for (std::size_t ix = 0; ix < s.xi.size(); ix += 3)
        worst = std::max(worst, std::abs(std::abs(w.at(iR, ix)) -
                                         std::abs(s.ic(s.R.at(iR), s.xi.at(ix) - frac * shift))));
    CHECK(worst <= 1e-13 * peak(w0));
  }
}

TEST_CASE("characteristics on sampled data") {
  const Setup s(1.25);
  const auto w0 = s.ic.sample(s.R, s.xi);
  // 2 v t equal to 1000 grid steps: translation is exact.
  const double t = 1000.0 * s.xi.step() / (2.0 * s.medium.v_gr);
  const auto a = evolve_characteristics(w0, s.medium, t);
  const auto b = evolve_characteristics(s.ic, s.R, s.xi, s.medium, t);
  // Columns whose source lies left of the grid are unknown to sampled data.
  const double shift = 2.0 * s.medium.v_gr * t;
  double worst = 0.0;
  for (std::size_t i = 0; i < s.R.size(); ++i)
    for (std::size_t j = 0; j < s.xi.size(); ++j)
      if (s.xi.at(j) - shift >= s.xi.min() - 0.5 * s.xi.step())
        worst = std::max(worst, std::abs(a.at(i, j) - b.at(i, j)));
  CHECK(worst < 1e-12 * peak(b));
  CHECK(a.t == t);
}

TEST_CASE("support leaving the grid is an error") {
  const Setup s(1.25);
  for (double t : {3.0 * s.t_cross, 30.0 * s.t_cross}) {
    try {
      evolve_characteristics(s.ic, s.R, s.xi, s.medium, t);
      FAIL("accepted");
    } catch (const NumericalError& e) {
      CHECK(e.code() == NumericalErrc::support_left_grid);
    }
  }
  CHECK_THROWS_AS(evolve_characteristics(s.ic, s.R, s.xi, s.medium, -1.0), ConfigError);
}

TEST_CASE("regularized delta has unit mass") {
  const double eps = 1e-7;
  double mass = 0.0;
  const double h = eps / 50.0;
  for (int i = -1000; i <= 1000; ++i) mass += regularized_delta(i * h, eps) * h;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(default_regularization(1e-8, 1e-6) == doctest::Approx(3e-8).epsilon(1e-15));
  CHECK(default_regularization(1e-8, 5e-6) == doctest::Approx(1e-7).epsilon(1e-15));
}

TEST_CASE("phase along one characteristic matches direct quadrature") {
  // Accumulate kappa * delta_eps(xi0 + 2 v t) dt exactly as the FD kick does.
  const auto medium = make_medium(reference_config());
  const double eps = 1e-7;
  const double xi0 = -2.4e-5;
  const double t_end = 2.0 * std::abs(xi0) / (2.0 * medium.v_gr);
  const int steps = 200000;
  const double dt = t_end / steps;
  double phase = 0.0;
  for (int n = 0; n < steps; ++n)
    phase += medium.kappa_cross * regularized_delta(xi0 + 2.0 * medium.v_gr * (n + 0.5) * dt, eps) * dt;
  CHECK(rel_diff(phase, oracle::quadrature_phase) < 1e-9);
  CHECK(rel_diff(medium.collision_phase(), oracle::quadrature_phase) < 1e-9);
}

TEST_CASE("fd: pure advection tracks the translated state") {
  const Setup s(0.0, 2048, 4);
  const auto w0 = s.ic.sample(s.R, s.xi);
  const auto fd = evolve_fd(w0, s.medium, s.t_cross, fd_settings(s));
  const auto exact = evolve_characteristics(s.ic, s.R, s.xi, s.medium, s.t_cross);
  CHECK(relative_l2_distance(fd, exact) < 1e-3);
  CHECK(fd.t == s.t_cross);
}

TEST_CASE("fd: measured phase agrees with the collision phase") {
  for (double dphi : {1.25, kPi}) {
    CAPTURE(dphi);
    const Setup s(dphi, 2048, 8);
    const auto w0 = s.ic.sample(s.R, s.xi);
    const auto fd = evolve_fd(w0, s.medium, s.t_cross, fd_settings(s));
    const auto m = extract_phase(w0, fd, s.medium.v_gr, s.t_cross);
    CHECK(std::abs(angle_diff(m.delta_phi, dphi)) < 1e-2);
    CHECK(rel_diff(fd.norm(), w0.norm()) < 1e-3);
    CHECK(std::abs(fd.center_of_mass() - w0.center_of_mass()) < 1e-12 * kWidth);
  }
}

TEST_CASE("fd: phase does not depend on the regularization width") {
  const Setup s(1.25, 2048, 4);
  const auto w0 = s.ic.sample(s.R, s.xi);
  const auto narrow = evolve_fd(w0, s.medium, s.t_cross, fd_settings(s, 0.9995, 3.0));
  const auto wide = evolve_fd(w0, s.medium, s.t_cross, fd_settings(s, 0.9995, 12.0));
  const auto a = extract_phase(w0, narrow, s.medium.v_gr, s.t_cross);
  const auto b = extract_phase(w0, wide, s.medium.v_gr, s.t_cross);
  CHECK(std::abs(angle_diff(a.delta_phi, b.delta_phi)) < 1e-2);
}

TEST_CASE("fd: refinement sharpens the phase") {
  const Setup coarse(1.25, 1024, 2);
  const Setup fine(1.25, 4096, 2);
  const auto measure = [](const Setup& s) {
    const auto w0 = s.ic.sample(s.R, s.xi);
    FdSettings fs = fd_settings(s);
    fs.epsilon = 8e-7;  // fixed in physical units across the two grids
    const auto fd = evolve_fd(w0, s.medium, s.t_cross, fs);
    return extract_phase(w0, fd, s.medium.v_gr, s.t_cross);
  };
  const auto a = measure(coarse);
  const auto b = measure(fine);
  CHECK(b.homogeneity < a.homogeneity);
  CHECK(std::abs(angle_diff(b.delta_phi, 1.25)) <= std::abs(angle_diff(a.delta_phi, 1.25)));
}

TEST_CASE("fd: constraint violations") {
  const Setup s(1.25, 512, 2);
  const auto w0 = s.ic.sample(s.R, s.xi);
  const auto code_of = [&](const FdSettings& fs) {
    try {
      evolve_fd(w0, s.medium, s.t_cross, fs);
    } catch (const NumericalError& e) {
      return e.code();
    }
    FAIL("accepted");
    return NumericalErrc::empty_input;
  };
  CHECK(code_of(fd_settings(s, 1.5)) == NumericalErrc::cfl_violation);
  CHECK(code_of(fd_settings(s, 0.9, 2.0)) == NumericalErrc::under_resolved_regularization);
  try {
    evolve_fd(w0, s.medium, 3.0 * s.t_cross, fd_settings(s));
    FAIL("accepted");
  } catch (const NumericalError& e) {
    CHECK(e.code() == NumericalErrc::support_left_grid);
  }
}

TEST_CASE("dephasing") {
  const MixingAngle matter = MixingAngle::from_radians(kPi / 2);
  CHECK(dephasing_factor(matter, 0.0, 1.0) == 1.0);
  CHECK(dephasing_factor(matter, 0.5, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  const MixingAngle slow = mixing_angle(0.1);
  CHECK(rel_diff(dephasing_factor(slow, 1e3, 40e-6), oracle::dephasing_factor_1ms_40us) < 1e-9);
  CHECK_THROWS_AS(dephasing_factor(slow, -1.0, 1.0), ConfigError);

  const Setup s(1.25, 256, 4);
  const auto w0 = s.ic.sample(s.R, s.xi);
  CHECK(apply_dephasing(w0, s.medium, 0.0, 1.0).amplitude == w0.amplitude);
  const auto damped = apply_dephasing(w0, s.medium, 1e3, 40e-6);
  CHECK(rel_diff(std::sqrt(damped.norm() / w0.norm()), oracle::dephasing_factor_1ms_40us) < 1e-9);
}

TEST_CASE("phase extraction on constructed solutions") {
  for (double dphi : {kPi, 1.25}) {
    CAPTURE(dphi);
    const Setup s(dphi, 2048, 16);
    const auto w0 = s.ic.sample(s.R, s.xi);
    const auto w = evolve_characteristics(s.ic, s.R, s.xi, s.medium, s.t_cross);
    const auto m = extract_phase(w0, w, s.medium.v_gr, s.t_cross);
    CHECK(std::abs(angle_diff(m.delta_phi, dphi)) < 1e-12);
    CHECK(m.homogeneity < 1e-6);
    CHECK(m.support_points > 0);
    CHECK(m.delta_phi > -kPi);
    CHECK(m.delta_phi <= kPi);
  }

  const Setup s(1.25, 512, 4);
  const auto w0 = s.ic.sample(s.R, s.xi);
  const auto half = evolve_characteristics(s.ic, s.R, s.xi, s.medium, 0.5 * s.t_cross);
  try {
    extract_phase(w0, half, s.medium.v_gr, 0.5 * s.t_cross);
    FAIL("accepted");
  } catch (const NumericalError& e) {
    CHECK(e.code() == NumericalErrc::not_transmitted);
  }
}

TEST_CASE("snapshot csv") {
  const Setup s(1.25, 16, 3);
  const auto w = s.ic.sample(s.R, s.xi);
  std::ostringstream out;
  write_snapshot_csv(out, w);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,R,xi,re_w,im_w,abs_w,phase_w");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 48);

  const Setup other(1.25, 32, 3);
  CHECK_THROWS_AS(relative_l2_distance(w, other.ic.sample(other.R, other.xi)), NumericalError);
}
