#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pulseforge/constants.hpp"

namespace pulseforge {

// Effective two-level drive of the two-photon ground -> Rydberg transition.
// Frequencies are angular (rad/s).
struct ExcitationConfig {
  double omega_ref = 0.0;  // two-photon Rabi frequency at the reference powers
  double p420_ref = 1.0;   // W
  double p1013_ref = 1.0;  // W
  double p420 = 1.0;       // operating powers, W
  double p1013 = 1.0;
  double delta_int = constants::two_pi * 1.69e9;  // intermediate-state detuning
  double delta_two = 0.0;                         // two-photon detuning

  void validate() const;
};

// Shot-to-shot noise. Power factors and the atom's velocity are drawn once per shot.
struct NoiseModel {
  double rel_std_420 = 0.0;
  double rel_std_1013 = 0.0;
  double temperature = 0.0;  // K
  double k_eff = constants::k_eff_counter_propagating;
  double atom_mass = constants::rb87_mass;
  std::size_t shots = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TwoLevelState {
  std::complex<double> c0{1.0, 0.0};  // ground
  std::complex<double> cr{0.0, 0.0};  // Rydberg

  double p0() const noexcept { return std::norm(c0); }
  double norm() const noexcept { return std::norm(c0) + std::norm(cr); }
};

struct TraceResult {
  std::vector<double> x;  // s
  std::vector<double> p0_mean;
  std::vector<double> p0_stderr;
};

// omega_ref * sqrt(p420/p420_ref) * sqrt(p1013/p1013_ref)
double effective_rabi(double p420, double p1013, const ExcitationConfig& cfg);

// k_eff * sqrt(k_B T / m): standard deviation of the Doppler detuning.
double doppler_sigma(double temperature, double k_eff, double mass);

// Exact constant-drive evolution under H = [[0, omega/2 e^{-i phase}], [omega/2 e^{i phase}, -delta]].
TwoLevelState propagate(const TwoLevelState& state, double omega, double delta, double duration, double phase = 0.0);

struct MonteCarloOptions {
  // Worker threads; results do not depend on it.
  unsigned threads = 1;
};

// Mean ground-state population after a drive of each duration.
TraceResult monte_carlo_rabi(std::span<const double> durations, const ExcitationConfig& cfg, const NoiseModel& noise,
                             const MonteCarloOptions& options = {});

struct RamseyOptions {
  double detuning_offset = 0.0;  // rad/s, added to every shot's detuning
  // Phase of the second pi/2 pulse relative to the first. pi makes P0 start at 1.
  double second_pulse_phase = 0.0;
  // Replace the finite pi/2 pulses by ideal instantaneous rotations. Test hook
  // for comparison with the analytic Doppler fringe.
  bool instantaneous_pulses = false;
};

// pi/2 - free evolution for each gap - pi/2. The pi/2 duration is pi / (2 Omega)
// at the nominal operating powers.
TraceResult monte_carlo_ramsey(std::span<const double> gaps, const ExcitationConfig& cfg, const NoiseModel& noise,
                               const RamseyOptions& ramsey = {}, const MonteCarloOptions& options = {});

}  // namespace pulseforge
