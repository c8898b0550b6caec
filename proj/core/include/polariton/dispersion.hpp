#pragma once

#include <string>
#include <vector>

#include "polariton/params.hpp"

namespace polariton {

/// Polariton mixing angle with v_gr = c cos^2(theta).
///
/// The angle is stored through its photonic fraction cos^2(theta) rather than
/// in radians: for ultra-slow light theta sits within ~1e-5 of pi/2, where a
/// double-precision angle cannot resolve cos^2 to better than ~1e-11.
class MixingAngle {
 public:
  static MixingAngle from_photonic_fraction(double cos2);
  static MixingAngle from_radians(double theta);

  double radians() const;
  double cos2() const noexcept { return cos2_; }
  double sin2() const noexcept { return sin2_; }

 private:
  MixingAngle(double cos2, double sin2) : cos2_(cos2), sin2_(sin2) {}

  double cos2_;
  double sin2_;
};

/// Group velocity above which the slow-light approximation is flagged.
inline constexpr double slow_light_limit = 0.1;  // fraction of c

/// v_gr = 2 c hbar |Omega0|^2 eps0 / (|mu|^2 omega n).
double group_velocity(const ExperimentConfig& config);
bool within_slow_light_regime(double v_gr) noexcept;

MixingAngle mixing_angle(double v_gr);

struct NonlinearCoefficients {
  double self_plus{};   // 2 a_{++} lambda v_rec f^3 / A
  double self_minus{};  // 2 a_{--} lambda v_rec f^3 / A
  double cross{};       // 2 a_{+-} lambda v_rec f^3 / A
};

NonlinearCoefficients nonlinear_coefficients(const ExperimentConfig& config, double v_rec);

/// Everything the polariton transport equation needs from the medium.
struct EitMedium {
  double v_gr{};
  MixingAngle theta = MixingAngle::from_photonic_fraction(1.0);
  double v_rec{};
  double kappa_self_plus{};
  double kappa_self_minus{};
  double kappa_cross{};
  double compression_ratio{};
  std::vector<std::string> warnings;

  /// Phase picked up by the pair amplitude when the two polaritons pass
  /// through each other: kappa_cross / (2 v_gr).
  double collision_phase() const;
};

EitMedium make_medium(const ExperimentConfig& config);
/// Same as above but with the group velocity supplied directly.
EitMedium make_medium(const ExperimentConfig& config, double v_gr);

}  // namespace polariton
