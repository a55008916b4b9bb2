#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "pulseforge/constants.hpp"
#include "pulseforge/damped_fit.hpp"
#include "pulseforge/errors.hpp"
#include "pulseforge/rydberg.hpp"

using namespace pulseforge;
using constants::two_pi;

namespace {

ExcitationConfig pulsed_scheme() {
  ExcitationConfig cfg;
  cfg.omega_ref = two_pi * 1.35e6;
  cfg.p420_ref = cfg.p420 = 1.0;
  cfg.p1013_ref = cfg.p1013 = 5.0;
  return cfg;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

}  // namespace

TEST_CASE("effective Rabi frequency scales with the square root of each power") {
  const ExcitationConfig cfg = pulsed_scheme();
  CHECK(effective_rabi(1.0, 5.0, cfg) == cfg.omega_ref);
  CHECK(effective_rabi(1.0, 50.0, cfg) / cfg.omega_ref == doctest::Approx(std::sqrt(10.0)).epsilon(1e-14));
  CHECK(effective_rabi(4.0, 5.0, cfg) / cfg.omega_ref == doctest::Approx(2.0).epsilon(1e-14));
  // 5 W -> 50 W peak: 2 pi x 4.269 MHz, inside the measured 4.25 +- 0.06 MHz.
  const double f50 = effective_rabi(1.0, 50.0, cfg) / two_pi;
  CHECK(std::abs(f50 - 4.25e6) <= 0.06e6);
  CHECK_THROWS_AS(effective_rabi(-1.0, 5.0, cfg), ParameterError);
}

TEST_CASE("Doppler width") {
  CHECK(doppler_sigma(0.0, constants::k_eff_counter_propagating, constants::rb87_mass) == 0.0);
  const double sigma = doppler_sigma(7e-6, constants::k_eff_counter_propagating, constants::rb87_mass);
  // Independent high-precision evaluation: 226625.675 rad/s, sqrt(2)/sigma = 6.2403 us.
  CHECK(sigma == doctest::Approx(226625.675240562).epsilon(1e-9));
  CHECK(std::sqrt(2.0) / sigma == doctest::Approx(6.24030600624538e-6).epsilon(1e-9));
  CHECK(constants::k_eff_counter_propagating == doctest::Approx(8757412.887598117).epsilon(1e-12));
  CHECK(doppler_sigma(28e-6, constants::k_eff_counter_propagating, constants::rb87_mass) / sigma ==
        doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("two-level propagation") {
  const double omega = two_pi * 1.35e6;
  const TwoLevelState ground;

  SUBCASE("zero duration is the identity") {
    const TwoLevelState s{{0.6, 0.0}, {0.0, 0.8}};
    const TwoLevelState out = propagate(s, omega, 1e5, 0.0);
    CHECK(out.c0 == s.c0);
    CHECK(out.cr == s.cr);
  }
  SUBCASE("resonant pi pulse empties the ground state") {
    CHECK(propagate(ground, omega, 0.0, M_PI / omega).p0() <= 1e-12);
  }
  SUBCASE("detuned half transfer from the generalized Rabi formula") {
    const double t = M_PI / (omega * std::sqrt(2.0));
    CHECK(std::abs(propagate(ground, omega, omega, t).p0() - 0.5) <= 1e-9);
    CHECK(std::abs(1.0 - oracle::generalized_rabi_pr(omega, omega, t) - 0.5) <= 1e-12);
  }
  SUBCASE("unitary and equal to the generalized Rabi formula (property)") {
    oracle::Gen gen(41);
    for (int trial = 0; trial < 500; ++trial) {
      const double om = gen.uniform(0.0, 5e7);
      const double de = gen.uniform(-5e7, 5e7);
      const double t = gen.uniform(0.0, 2e-5);
      const double ph = gen.uniform(-M_PI, M_PI);
      const double a = gen.uniform(0.0, 1.0);
      TwoLevelState s{std::polar(std::sqrt(a), gen.uniform(0.0, 6.3)), std::polar(std::sqrt(1.0 - a), gen.uniform(0.0, 6.3))};
      CHECK(std::abs(propagate(s, om, de, t, ph).norm() - 1.0) <= 1e-12);
      CHECK(std::abs(propagate(ground, om, de, t, ph).p0() - (1.0 - oracle::generalized_rabi_pr(om, de, t))) <= 1e-9);
    }
  }
  CHECK_THROWS_AS(propagate(ground, omega, 0.0, -1.0), ParameterError);
}

TEST_CASE("Monte-Carlo Rabi traces") {
  const ExcitationConfig cfg = pulsed_scheme();
  const std::vector<double> durations = linspace(0.0, 10e-6, 201);

  SUBCASE("noiseless trace is cos^2(Omega t / 2)") {
    NoiseModel quiet;
    quiet.shots = 3;
    const TraceResult tr = monte_carlo_rabi(durations, cfg, quiet);
    for (std::size_t i = 0; i < durations.size(); ++i) {
      const double c = std::cos(0.5 * cfg.omega_ref * durations[i]);
      CHECK(std::abs(tr.p0_mean[i] - c * c) <= 1e-9);
      CHECK(tr.p0_stderr[i] <= 1e-12);
    }
  }
  SUBCASE("deterministic per seed and independent of thread count") {
    NoiseModel noise;
    noise.rel_std_420 = 0.01;
    noise.rel_std_1013 = 0.02;
    noise.temperature = 7e-6;
    noise.shots = 40;
    noise.seed = 1234;
    const TraceResult a = monte_carlo_rabi(durations, cfg, noise, {1});
    const TraceResult b = monte_carlo_rabi(durations, cfg, noise, {4});
    for (std::size_t i = 0; i < durations.size(); ++i) {
      CHECK(a.p0_mean[i] == b.p0_mean[i]);
      CHECK(a.p0_stderr[i] == b.p0_stderr[i]);
      CHECK(a.p0_mean[i] >= 0.0);
      CHECK(a.p0_mean[i] <= 1.0);
    }
    noise.seed = 1235;
    const TraceResult c = monte_carlo_rabi(durations, cfg, noise);
    CHECK(c.p0_mean[150] != a.p0_mean[150]);
  }
  SUBCASE("fitted frequency follows the square-root power law") {
    NoiseModel noise;
    noise.rel_std_420 = 0.01;
    noise.rel_std_1013 = 0.02;
    noise.shots = 60;
    noise.seed = 5;
    for (const auto& [s420, s1013] : {std::pair{1.0, 1.0}, {1.0, 4.0}, {2.0, 3.0}}) {
      ExcitationConfig scaled = cfg;
      scaled.p420 = cfg.p420_ref * s420;
      scaled.p1013 = cfg.p1013_ref * s1013;
      const double expect = cfg.omega_ref * std::sqrt(s420 * s1013);
      const std::vector<double> xs = linspace(0.0, 12.0 * two_pi / expect, 240);
      const DampedFit fit = fit_damped_sinusoid(monte_carlo_rabi(xs, scaled, noise), EnvelopeKind::exponential);
      CHECK(std::abs(fit.frequency / expect - 1.0) <= std::max(3.0 * fit.frequency_stderr / expect, 1e-3));
    }
  }
  SUBCASE("invalid inputs") {
    NoiseModel noise;
    noise.shots = 0;
    CHECK_THROWS_AS(monte_carlo_rabi(durations, cfg, noise), ParameterError);
    const std::vector<double> bad{-1e-6};
    CHECK_THROWS_AS(monte_carlo_rabi(bad, cfg, NoiseModel{}), InputError);
  }
}

TEST_CASE("Monte-Carlo Ramsey traces") {
  const ExcitationConfig cfg = pulsed_scheme();
  const std::vector<double> gaps = linspace(0.0, 12e-6, 121);

  SUBCASE("zero temperature gives an undamped fringe at the offset") {
    NoiseModel quiet;
    RamseyOptions ro;
    ro.detuning_offset = two_pi * 500e3;
    ro.instantaneous_pulses = true;
    const TraceResult tr = monte_carlo_ramsey(gaps, cfg, quiet, ro);
    const DampedFit fit = fit_damped_sinusoid(tr, EnvelopeKind::exponential);
    CHECK(fit.frequency / two_pi == doctest::Approx(500e3).epsilon(1e-6));
    CHECK(fit.contrast >= 0.999);
    // Same-phase pulses: P0 = (1 - cos(delta t)) / 2.
    for (std::size_t i = 0; i < gaps.size(); ++i)
      CHECK(std::abs(tr.p0_mean[i] - 0.5 * (1.0 - std::cos(ro.detuning_offset * gaps[i]))) <= 1e-12);
  }
  SUBCASE("finite pulses on resonance: gap 0 is a pi pulse") {
    NoiseModel quiet;
    const std::vector<double> zero{0.0};
    CHECK(monte_carlo_ramsey(zero, cfg, quiet).p0_mean[0] <= 1e-12);
    RamseyOptions reversed;
    reversed.second_pulse_phase = M_PI;
    CHECK(monte_carlo_ramsey(zero, cfg, quiet, reversed).p0_mean[0] >= 1.0 - 1e-12);
  }
  SUBCASE("envelope time halves when the temperature quadruples") {
    NoiseModel noise;
    noise.shots = 4000;
    noise.seed = 77;
    RamseyOptions ro;
    ro.detuning_offset = two_pi * 1e6;
    ro.instantaneous_pulses = true;
    noise.temperature = 7e-6;
    const DampedFit cold = fit_damped_sinusoid(monte_carlo_ramsey(gaps, cfg, noise, ro), EnvelopeKind::gaussian);
    noise.temperature = 28e-6;
    const std::vector<double> short_gaps = linspace(0.0, 6e-6, 121);
    const DampedFit warm = fit_damped_sinusoid(monte_carlo_ramsey(short_gaps, cfg, noise, ro), EnvelopeKind::gaussian);
    CHECK(warm.decay_1e / cold.decay_1e == doctest::Approx(0.5).epsilon(0.05));
  }
  SUBCASE("deterministic per seed across thread counts") {
    NoiseModel noise;
    noise.temperature = 7e-6;
    noise.rel_std_1013 = 0.02;
    noise.shots = 50;
    noise.seed = 9;
    const TraceResult a = monte_carlo_ramsey(gaps, cfg, noise, {}, {1});
    const TraceResult b = monte_carlo_ramsey(gaps, cfg, noise, {}, {3});
    for (std::size_t i = 0; i < gaps.size(); ++i) CHECK(a.p0_mean[i] == b.p0_mean[i]);
  }
}
