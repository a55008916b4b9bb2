#pragma once

#include <span>
#include <string_view>

#include "pulseforge/rydberg.hpp"

namespace pulseforge {

enum class EnvelopeKind { exponential, gaussian };

std::string_view to_string(EnvelopeKind kind) noexcept;
// Throws ParameterError for anything but "exponential" or "gaussian".
EnvelopeKind envelope_from_string(std::string_view name);

// Least-squares fit of y(x) = offset + amplitude * env(x) * cos(frequency * x + phase)
// with env = exp(-x / decay_1e) or exp(-(x / decay_1e)^2). The envelope and
// contrast are referenced to the first sample, which is x = 0 for scan traces.
struct DampedFit {
  double frequency = 0.0;  // rad/s
  double decay_1e = 0.0;   // s; +inf when the fit finds no measurable decay
  double contrast = 0.0;   // 2 * amplitude, the peak-to-peak swing at x = 0
  double offset = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;  // rad, in (-pi, pi]
  EnvelopeKind envelope = EnvelopeKind::exponential;

  // One-sigma uncertainties from the Gauss-Newton covariance at the optimum.
  double frequency_stderr = 0.0;
  double decay_stderr = 0.0;
  double contrast_stderr = 0.0;
  double residual_rms = 0.0;
  std::size_t points = 0;
  // True when fewer than 4 periods or 8 points per period were sampled.
  bool undersampled = false;
};

// x must be uniformly spaced (the initial frequency comes from a zero-padded FFT).
// Throws FitDegenerateError when the trace does not oscillate.
DampedFit fit_damped_sinusoid(std::span<const double> x, std::span<const double> y, EnvelopeKind envelope);
DampedFit fit_damped_sinusoid(const TraceResult& trace, EnvelopeKind envelope);

}  // namespace pulseforge
