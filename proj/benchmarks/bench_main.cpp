#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "pulseforge/amplifier.hpp"
#include "pulseforge/calibration.hpp"
#include "pulseforge/constants.hpp"
#include "pulseforge/damped_fit.hpp"
#include "pulseforge/rydberg.hpp"

using namespace pulseforge;

namespace {

Waveform flat(std::size_t n, double level) {
  const TimeGrid g(0.0, 1e-6 / static_cast<double>(n), n);
  return Waveform(g, std::vector<double>(n, level));
}

ExcitationConfig scheme() {
  ExcitationConfig cfg;
  cfg.omega_ref = constants::two_pi * 1.35e6;
  cfg.p420_ref = cfg.p420 = 1.0;
  cfg.p1013_ref = cfg.p1013 = 5.0;
  return cfg;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

void BM_ForwardAmplify(benchmark::State& state) {
  const Waveform in = flat(static_cast<std::size_t>(state.range(0)), 2.0);
  const AmplifierParams amp{10.0, 2.5e-6};
  for (auto _ : state) benchmark::DoNotOptimize(forward_amplify(in, amp));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardAmplify)->Arg(1'000)->Arg(10'000)->Arg(100'000);

void BM_InversePreshape(benchmark::State& state) {
  const Waveform target = flat(static_cast<std::size_t>(state.range(0)), 20.0);
  const AmplifierParams amp{10.0, 2.5e-6};
  for (auto _ : state) benchmark::DoNotOptimize(inverse_preshape(target, amp));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_InversePreshape)->Arg(10'000);

void BM_FitAmplifierParams(benchmark::State& state) {
  const TimeGrid g(-0.2e-6, 1e-9, 1401);
  std::vector<double> v(g.size(), 0.0);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g.time(k) >= 0.0 && g.time(k) < 1e-6) v[k] = 2.0;
  const Waveform in(g, v);
  const std::vector<FitPair> pairs{{in, forward_amplify(in, {12.0, 3e-6})}};
  for (auto _ : state) benchmark::DoNotOptimize(fit_amplifier_params(pairs, {3.0, 1e-6}));
}
BENCHMARK(BM_FitAmplifierParams)->Unit(benchmark::kMillisecond);

void BM_RamseyMonteCarlo(benchmark::State& state) {
  NoiseModel noise;
  noise.temperature = 7e-6;
  noise.rel_std_1013 = 0.02;
  noise.rel_std_420 = 0.01;
  noise.shots = static_cast<std::size_t>(state.range(0));
  RamseyOptions ro;
  ro.detuning_offset = constants::two_pi * 0.5e6;
  const std::vector<double> gaps = linspace(0.0, 15e-6, 150);
  const ExcitationConfig cfg = scheme();
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_ramsey(gaps, cfg, noise, ro));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 150);
}
BENCHMARK(BM_RamseyMonteCarlo)->Arg(1'000)->Arg(10'000)->Unit(benchmark::kMillisecond);

void BM_DampedFit(benchmark::State& state) {
  const std::vector<double> x = linspace(0.0, 12e-6, static_cast<std::size_t>(state.range(0)));
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] = 0.5 + 0.48 * std::exp(-x[i] / 15e-6) * std::cos(constants::two_pi * 1.35e6 * x[i]);
  for (auto _ : state) benchmark::DoNotOptimize(fit_damped_sinusoid(x, y, EnvelopeKind::exponential));
}
BENCHMARK(BM_DampedFit)->Arg(200)->Arg(2'000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
