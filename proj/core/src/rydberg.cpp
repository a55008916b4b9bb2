#include "pulseforge/rydberg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "pulseforge/errors.hpp"
#include "pulseforge/rng.hpp"

namespace pulseforge {

namespace {

using cd = std::complex<double>;

struct ShotSample {
  double omega_scale;  // sqrt of the product of the two power factors
  double doppler;      // rad/s
};

class ShotSampler {
 public:
  explicit ShotSampler(const NoiseModel& noise)
      : noise_(noise),
        velocity_std_(noise.temperature > 0.0 ? std::sqrt(constants::boltzmann * noise.temperature / noise.atom_mass)
                                              : 0.0) {}

  // Draw order is fixed: 420 nm factor, 1013 nm factor, velocity.
  ShotSample draw(std::uint64_t stream) const {
    StreamEngine engine = stream_engine(noise_.seed, stream);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double n420 = normal(engine);
    const double n1013 = normal(engine);
    const double nv = normal(engine);
    const double f420 = std::max(0.0, 1.0 + noise_.rel_std_420 * n420);
    const double f1013 = std::max(0.0, 1.0 + noise_.rel_std_1013 * n1013);
    return {std::sqrt(f420 * f1013), noise_.k_eff * velocity_std_ * nv};
  }

 private:
  NoiseModel noise_;
  double velocity_std_;
};

// Runs fn(point) for every point index, spread over `threads` workers. Each
// point is handled entirely by one worker, so per-point sums keep their order.
template <class Fn>
void for_each_point(std::size_t points, unsigned threads, Fn fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(points)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < points; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (std::size_t i = next++; i < points; i = next++) fn(i);
    });
  }
}

void accumulate(std::span<const double> values, double& mean, double& stderr) {
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  mean = sum / n;
  if (values.size() < 2) {
    stderr = 0.0;
    return;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  stderr = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

TraceResult run_trace(std::span<const double> xs, const NoiseModel& noise, unsigned threads,
                      const auto& shot_p0) {
  for (double x : xs)
    if (!(x >= 0.0) || !std::isfinite(x)) throw InputError("scan values must be finite and >= 0");
  TraceResult out;
  out.x.assign(xs.begin(), xs.end());
  out.p0_mean.resize(xs.size());
  out.p0_stderr.resize(xs.size());
  const ShotSampler sampler(noise);
  for_each_point(xs.size(), threads, [&](std::size_t i) {
    std::vector<double> values(noise.shots);
    for (std::size_t s = 0; s < noise.shots; ++s) {
      const ShotSample shot = sampler.draw(static_cast<std::uint64_t>(i) * noise.shots + s);
      values[s] = std::clamp(shot_p0(xs[i], shot), 0.0, 1.0);
    }
    accumulate(values, out.p0_mean[i], out.p0_stderr[i]);
  });
  return out;
}

}  // namespace

void ExcitationConfig::validate() const {
  if (!(omega_ref > 0.0) || !std::isfinite(omega_ref)) throw ParameterError("omega_ref must be > 0");
  if (!(p420_ref > 0.0) || !(p1013_ref > 0.0)) throw ParameterError("reference powers must be > 0");
  if (!(p420 >= 0.0) || !(p1013 >= 0.0)) throw ParameterError("operating powers must be >= 0");
  if (delta_int == 0.0 || !std::isfinite(delta_int)) throw ParameterError("intermediate detuning must be nonzero");
  if (!std::isfinite(delta_two)) throw ParameterError("two-photon detuning must be finite");
}

void NoiseModel::validate() const {
  const bool ok = rel_std_420 >= 0.0 && rel_std_1013 >= 0.0 && temperature >= 0.0 && k_eff >= 0.0 &&
                  atom_mass > 0.0 && std::isfinite(rel_std_420) && std::isfinite(rel_std_1013) &&
                  std::isfinite(temperature) && std::isfinite(k_eff) && std::isfinite(atom_mass);
  if (!ok) throw ParameterError("noise model values must be finite and nonnegative (mass > 0)");
  if (shots < 1) throw ParameterError("shots must be >= 1");
}

double effective_rabi(double p420, double p1013, const ExcitationConfig& cfg) {
  if (!(p420 >= 0.0) || !(p1013 >= 0.0)) throw ParameterError("powers must be >= 0");
  return cfg.omega_ref * std::sqrt(p420 / cfg.p420_ref) * std::sqrt(p1013 / cfg.p1013_ref);
}

double doppler_sigma(double temperature, double k_eff, double mass) {
  if (!(temperature >= 0.0) || !(k_eff >= 0.0) || !(mass > 0.0)) throw ParameterError("invalid Doppler inputs");
  return k_eff * std::sqrt(constants::boltzmann * temperature / mass);
}

TwoLevelState propagate(const TwoLevelState& state, double omega, double delta, double duration, double phase) {
  if (!(duration >= 0.0)) throw ParameterError("duration must be >= 0");
  if (duration == 0.0) return state;
  // H = -delta/2 * I + 1/2 (omega cos(phase) sx + omega sin(phase) sy + delta sz)
  const double w = std::hypot(omega, delta);
  const cd global = std::polar(1.0, 0.5 * delta * duration);
  TwoLevelState out;
  if (w == 0.0) {
    out.c0 = global * state.c0;
    out.cr = global * state.cr;
    return out;
  }
  const double c = std::cos(0.5 * w * duration);
  const double s = std::sin(0.5 * w * duration);
  const cd i(0.0, 1.0);
  const cd u00 = c - i * s * (delta / w);
  const cd u11 = c + i * s * (delta / w);
  const cd u01 = -i * s * (omega / w) * std::polar(1.0, -phase);
  const cd u10 = -i * s * (omega / w) * std::polar(1.0, phase);
  out.c0 = global * (u00 * state.c0 + u01 * state.cr);
  out.cr = global * (u10 * state.c0 + u11 * state.cr);
  return out;
}

TraceResult monte_carlo_rabi(std::span<const double> durations, const ExcitationConfig& cfg, const NoiseModel& noise,
                             const MonteCarloOptions& options) {
  cfg.validate();
  noise.validate();
  const double omega = effective_rabi(cfg.p420, cfg.p1013, cfg);
  return run_trace(durations, noise, options.threads, [&](double t, const ShotSample& shot) {
    return propagate(TwoLevelState{}, omega * shot.omega_scale, cfg.delta_two + shot.doppler, t).p0();
  });
}

TraceResult monte_carlo_ramsey(std::span<const double> gaps, const ExcitationConfig& cfg, const NoiseModel& noise,
                               const RamseyOptions& ramsey, const MonteCarloOptions& options) {
  cfg.validate();
  noise.validate();
  const double omega = effective_rabi(cfg.p420, cfg.p1013, cfg);
  if (!(omega > 0.0)) throw ParameterError("Ramsey needs a nonzero Rabi frequency for the pi/2 pulses");
  const double half_pi_time = constants::pi / (2.0 * omega);
  return run_trace(gaps, noise, options.threads, [&](double gap, const ShotSample& shot) {
    const double delta = cfg.delta_two + ramsey.detuning_offset + shot.doppler;
    TwoLevelState st;
    if (ramsey.instantaneous_pulses) {
      // Resonant rotations of area pi/2, applied with infinite Rabi frequency.
      st = propagate(st, 1.0, 0.0, constants::pi / 2.0);
      st = propagate(st, 0.0, delta, gap);
      st = propagate(st, 1.0, 0.0, constants::pi / 2.0, ramsey.second_pulse_phase);
    } else {
      const double om = omega * shot.omega_scale;
      st = propagate(st, om, delta, half_pi_time);
      st = propagate(st, 0.0, delta, gap);
      st = propagate(st, om, delta, half_pi_time, ramsey.second_pulse_phase);
    }
    return st.p0();
  });
}

}  // namespace pulseforge
