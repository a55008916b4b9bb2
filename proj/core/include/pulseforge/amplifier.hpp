#pragma once

#include "pulseforge/waveform.hpp"

namespace pulseforge {

// Reduced saturable-gain model: small-signal gain and saturation energy.
// The transverse mode area is folded into e_sat, so all traces are power.
struct AmplifierParams {
  double g0 = 1.0;     // small-signal gain, >= 1
  double e_sat = 1.0;  // joules, > 0

  void validate() const;
};

// Microscopic description of the gain medium.
struct GainMediumMicro {
  double sigma = 0.0;             // stimulated-emission cross-section, m^2
  double column_inversion = 0.0;  // integral of the initial inversion along the fiber, m^-2
  double photon_energy = 0.0;     // h*nu, J

  void validate() const;
};

// g0 = g_floor * exp(alpha * pump_w). A user calibration, not a physical law.
struct PumpMap {
  double alpha = 0.0;    // 1/W
  double g_floor = 1.0;  // >= 1
};

// g0 = exp(sigma * column_inversion), e_sat = (h*nu / (2*sigma)) * mode_area.
AmplifierParams micro_to_reduced(const GainMediumMicro& m, double mode_area_m2);
// Inverse of micro_to_reduced for a given photon energy and mode area.
GainMediumMicro reduced_to_micro(const AmplifierParams& p, double photon_energy_j, double mode_area_m2);

// Output power of a pulse after the saturable amplifier:
//   P_out = P_in / (1 - (1 - 1/g0) * exp(-E_in / e_sat))
// with E_in the trapezoidal running input energy at the same sample.
Waveform forward_amplify(const Waveform& input, const AmplifierParams& p);

// Closed-form output energy e_sat * ln(1 + g0 * (exp(E_in/e_sat) - 1)).
double output_energy(const Waveform& input, const AmplifierParams& p);
double output_energy(double input_energy_j, const AmplifierParams& p);

// Input that produces `target` at the output:
//   P_in = P_target / (1 - (1 - g0) * exp(-E_target / e_sat))
Waveform inverse_preshape(const Waveform& target, const AmplifierParams& p);

double pump_to_gain(double pump_w, const PumpMap& map);

}  // namespace pulseforge
