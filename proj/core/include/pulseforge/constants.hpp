#pragma once

#include <numbers>

namespace pulseforge::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double boltzmann = 1.380649e-23;         // J/K
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double rb87_mass = 86.909180527 * atomic_mass_unit;

inline constexpr double blue_wavelength = 420e-9;  // m
inline constexpr double ir_wavelength = 1013e-9;   // m

// Effective two-photon wavevector for counter-propagating 420/1013 nm beams.
inline constexpr double k_eff_counter_propagating = two_pi * (1.0 / blue_wavelength - 1.0 / ir_wavelength);

}  // namespace pulseforge::constants
