#pragma once

#include <numbers>

// CODATA 2018 values, SI units.
namespace polariton::constants {

inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double c = 299792458.0;              // m / s
inline constexpr double epsilon0 = 8.8541878128e-12;  // F / m
inline constexpr double amu = 1.66053906660e-27;      // kg
inline constexpr double pi = std::numbers::pi;

}  // namespace polariton::constants
