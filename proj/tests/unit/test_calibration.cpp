#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "../scenarios.hpp"
#include "pulseforge/calibration.hpp"
#include "pulseforge/errors.hpp"
#include "pulseforge/simplex.hpp"

using namespace pulseforge;

TEST_CASE("simplex minimizes a shifted quadratic and the Rosenbrock valley") {
  auto bowl = [](std::span<const double> x) { return (x[0] - 1.5) * (x[0] - 1.5) + 4.0 * (x[1] + 0.5) * (x[1] + 0.5); };
  const SimplexResult r = minimize_simplex(bowl, {0.0, 0.0}, {0.5, 0.5});
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(-0.5).epsilon(1e-6));

  auto rosen = [](std::span<const double> x) {
    return 100.0 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1.0 - x[0]) * (1.0 - x[0]);
  };
  SimplexOptions opts;
  opts.max_iterations = 2000;
  const SimplexResult rr = minimize_simplex(rosen, {-1.2, 1.0}, {0.5, 0.5}, opts);
  CHECK(rr.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(rr.x[1] == doctest::Approx(1.0).epsilon(1e-5));

  SUBCASE("best value never increases across iterations") {
    NelderMead nm(rosen, {-1.2, 1.0}, {0.5, 0.5});
    double prev = nm.best_value();
    for (int i = 0; i < 200; ++i) {
      nm.iterate();
      CHECK(nm.best_value() <= prev);
      prev = nm.best_value();
    }
  }
  SUBCASE("non-finite objective values are treated as +inf") {
    auto guarded = [](std::span<const double> x) { return x[0] < 0.0 ? NAN : (x[0] - 2.0) * (x[0] - 2.0); };
    const SimplexResult g = minimize_simplex(guarded, {0.5}, {1.0});
    CHECK(g.x[0] == doctest::Approx(2.0).epsilon(1e-6));
  }
}

TEST_CASE("drive family evaluation") {
  const TimeGrid g(-0.1e-6, 1e-9, 1301);
  const double width = 1e-6;

  SUBCASE("equal levels give a square pulse") {
    const Waveform w = eval_preshape({0.4, 0.3e-6, 0.4, 0.2e-6, 0.4}, g, width);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double t = g.time(k);
      CHECK(w[k] == ((t >= 0.0 && t < width) ? 0.4 : 0.0));
    }
  }
  SUBCASE("continuous at the knee") {
    const PreshapeParams p{0.1, 0.37e-6, 0.45, 0.2e-6, 0.9};
    CHECK(p.value_at(p.t_knee, width) == 0.45);
    CHECK(p.value_at(std::nextafter(p.t_knee, 1.0), width) == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(p.value_at(std::nextafter(p.t_knee, 0.0), width) == doctest::Approx(0.45).epsilon(1e-12));
  }
  SUBCASE("monotone nondecreasing inside the pulse") {
    oracle::Gen gen(8);
    for (int trial = 0; trial < 50; ++trial) {
      PreshapeParams p;
      p.p_start = gen.uniform(0.0, 0.3);
      p.p_knee = p.p_start + gen.uniform(0.0, 0.3);
      p.p_end = p.p_knee + gen.uniform(0.0, 0.3);
      p.t_knee = gen.uniform(0.01, 0.99) * width;
      p.tau_exp = gen.uniform(0.01, 3.0) * width;
      const Waveform w = eval_preshape(p, g, width);
      for (std::size_t k = 1; k < g.size(); ++k)
        if (g.time(k) >= 0.0 && g.time(k) < width) CHECK(w[k] >= w[k - 1]);
    }
  }
  SUBCASE("small time constant approaches a step after the knee") {
    const TimeGrid fine(0.0, 1e-9, 1001);
    const PreshapeParams p{0.1, 300e-9, 0.2, 0.2e-9, 0.9};
    const Waveform w = eval_preshape(p, fine, width);
    const double bound = std::exp(-fine.dt() / p.tau_exp) * (p.p_end - p.p_knee);
    for (std::size_t k = 0; k < fine.size(); ++k) {
      const double t = fine.time(k);
      if (t > p.t_knee + 1e-15 && t < width) CHECK(std::abs(w[k] - p.p_end) <= bound * (1.0 + 1e-9));
    }
  }
  SUBCASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(eval_preshape({0.5, 0.3e-6, 0.4, 0.2e-6, 0.9}, g, width), ParameterError);
    CHECK_THROWS_AS(eval_preshape({0.1, 0.0, 0.4, 0.2e-6, 0.9}, g, width), ParameterError);
    CHECK_THROWS_AS(eval_preshape({0.1, 0.3e-6, 0.4, 0.0, 0.9}, g, width), ParameterError);
    CHECK_THROWS_AS(eval_preshape({0.1, 1.2e-6, 0.4, 0.2e-6, 0.9}, g, width), ParameterError);
  }
  SUBCASE("projection recovers a member of the family") {
    const PreshapeParams p{0.12, 0.31e-6, 0.4, 0.27e-6, 0.85};
    const PreshapeParams q = project_preshape(eval_preshape(p, g, width), width);
    CHECK(q.p_start == doctest::Approx(p.p_start).epsilon(1e-4));
    CHECK(q.p_knee == doctest::Approx(p.p_knee).epsilon(1e-4));
    CHECK(q.p_end == doctest::Approx(p.p_end).epsilon(1e-4));
    CHECK(q.t_knee == doctest::Approx(p.t_knee).epsilon(1e-3));
    CHECK(q.tau_exp == doctest::Approx(p.tau_exp).epsilon(1e-3));
  }
}

TEST_CASE("modulator transfer maps") {
  CHECK(AomTransfer::identity()(0.3) == 0.3);
  CHECK(AomTransfer::sin2()(0.0) == 0.0);
  CHECK(AomTransfer::sin2()(1.0) == doctest::Approx(1.0));
  CHECK(AomTransfer::sin2()(0.5) == doctest::Approx(0.5));
  const AomTransfer t = AomTransfer::table({{0.0, 0.0}, {0.5, 0.2}, {1.0, 1.0}});
  CHECK(t(0.25) == doctest::Approx(0.1));
  CHECK(t(0.75) == doctest::Approx(0.6));
  CHECK_THROWS_AS(AomTransfer::table({{0.0, 0.1}, {1.0, 1.0}}), ParameterError);
  CHECK_THROWS_AS(AomTransfer::table({{0.0, 0.0}, {0.5, 0.6}, {1.0, 0.5}}), ParameterError);
}

TEST_CASE("simulated plant") {
  const TimeGrid g(0.0, 1e-9, 1001);
  const Waveform drive = scenario::square(g, 0.0, 0.8e-6, 0.6);
  PlantConfig cfg;
  cfg.amp = {10.0, 5e-6};
  cfg.seed_peak_w = 4.0;

  SUBCASE("identity transfer without noise is the amplifier alone") {
    cfg.transfer = AomTransfer::identity();
    const PlantOutput out = simulate_plant(drive, cfg);
    const Waveform direct = forward_amplify(drive.scaled(4.0), cfg.amp);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(out.output[k] == direct[k]);
    CHECK_FALSE(out.clipped);
  }
  SUBCASE("sin^2 transfer against the constant-input closed form") {
    cfg.transfer = AomTransfer::sin2();
    const PlantOutput out = simulate_plant(drive, cfg);
    const double s = std::sin(M_PI * 0.6 / 2.0);
    const double seed_power = 4.0 * s * s;
    for (std::size_t k = 1; k < 800; k += 37) {
      const double t = g.time(k) + 0.5 * g.dt() - 0.5 * g.dt();  // grid starts on the edge
      const double expect = oracle::constant_input_output(seed_power, t, 10.0, 5e-6);
      CHECK(out.output[k] == doctest::Approx(expect).epsilon(1e-8));
    }
    // Leading edge is reshaped relative to the identity-transfer plant.
    cfg.transfer = AomTransfer::identity();
    const PlantOutput lin = simulate_plant(drive, cfg);
    CHECK(out.output[0] / out.output[700] != doctest::Approx(lin.output[0] / lin.output[700]));
  }
  SUBCASE("noise is deterministic per seed") {
    cfg.noise_rel_std = 0.01;
    cfg.seed = 99;
    const PlantOutput a = simulate_plant(drive, cfg);
    const PlantOutput b = simulate_plant(drive, cfg);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(a.output[k] == b.output[k]);
    cfg.seed = 100;
    const PlantOutput c = simulate_plant(drive, cfg);
    CHECK(c.output[10] != a.output[10]);
  }
  SUBCASE("out-of-range drive is clipped and flagged") {
    const PlantOutput out = simulate_plant(drive.scaled(2.0), cfg);
    CHECK(out.clipped);
    cfg.transfer = AomTransfer::sin2();
    const PlantOutput full = simulate_plant(scenario::square(g, 0.0, 0.8e-6, 1.0), cfg);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(out.output[k] == doctest::Approx(full.output[k]).epsilon(1e-12));
  }
}

TEST_CASE("amplifier parameter fit") {
  const TimeGrid g(-0.2e-6, 1e-9, 1401);
  const Waveform input = scenario::square(g, 0.0, 1e-6, 2.0);
  const AmplifierParams truth{12.0, 3e-6};

  SUBCASE("noiseless synthetic pair") {
    const std::vector<FitPair> pairs{{input, forward_amplify(input, truth)}};
    const FitResult r = fit_amplifier_params(pairs, {3.0, 1e-6});
    CHECK(r.converged);
    CHECK(r.params.g0 == doctest::Approx(truth.g0).epsilon(1e-4));
    CHECK(r.params.e_sat == doctest::Approx(truth.e_sat).epsilon(1e-4));
    CHECK(r.residual_rms >= 0.0);
  }
  SUBCASE("transparent pair fits g0 = 1") {
    const std::vector<FitPair> pairs{{input, input}};
    const FitResult r = fit_amplifier_params(pairs, {5.0, 1e-6});
    CHECK(std::abs(r.params.g0 - 1.0) <= 1e-6);
  }
  SUBCASE("rescaling both waveforms rescales e_sat only") {
    const std::vector<FitPair> pairs{{input, forward_amplify(input, truth)}};
    const FitResult base = fit_amplifier_params(pairs, {3.0, 1e-6});
    const double s = 7.5;
    const std::vector<FitPair> scaled{{input.scaled(s), forward_amplify(input, truth).scaled(s)}};
    const FitResult r = fit_amplifier_params(scaled, {3.0, s * 1e-6});
    CHECK(r.params.g0 == doctest::Approx(base.params.g0).epsilon(1e-6));
    CHECK(r.params.e_sat / s == doctest::Approx(base.params.e_sat).epsilon(1e-6));
  }
  SUBCASE("noisy outputs stay within 3%") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      std::mt19937_64 engine(seed);
      std::normal_distribution<double> noise(0.0, 0.01);
      const Waveform clean = forward_amplify(input, truth);
      std::vector<double> v(clean.samples().begin(), clean.samples().end());
      for (double& x : v) x *= 1.0 + noise(engine);
      const std::vector<FitPair> pairs{{input, Waveform(g, v)}};
      const FitResult r = fit_amplifier_params(pairs, {3.0, 1e-6});
      CHECK(r.params.g0 == doctest::Approx(truth.g0).epsilon(0.03));
      CHECK(r.params.e_sat == doctest::Approx(truth.e_sat).epsilon(0.03));
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(fit_amplifier_params(std::vector<FitPair>{}, truth), DataError);
    const std::vector<FitPair> zero{{Waveform(g), input}};
    CHECK_THROWS_AS(fit_amplifier_params(zero, truth), DataError);
  }
}

TEST_CASE("closed-loop pre-shaping") {
  const scenario::SquarePulse sq;
  const Waveform target = sq.target();

  SUBCASE("nothing to correct on a transparent identity plant") {
    PlantConfig cfg = sq.plant(AomTransfer::identity(), 0.0, 1);
    cfg.amp = {1.0, 1.0};
    cfg.seed_peak_w = 40.0;
    LoopSettings settings;
    settings.width = sq.width;
    settings.tolerance = 1e-9;
    const PreshapeParams flat{0.5, 0.3e-6, 0.5, 0.2e-6, 0.5};
    const auto [best, report] = closed_loop_preshape(target, make_simulated_plant(cfg), flat, sq.window, settings);
    CHECK(report.iterations() == 1);
    CHECK(report.best_rms <= 1e-12);
    CHECK(report.reached_tolerance);
  }
  SUBCASE("pure amplifier plant from the projected analytic inverse") {
    const PlantConfig cfg = sq.plant(AomTransfer::identity(), 0.0, 1);
    LoopSettings settings;
    settings.width = sq.width;
    settings.tolerance = 0.01;
    settings.max_iterations = 50;
    const auto [best, report] =
        closed_loop_preshape(target, make_simulated_plant(cfg), sq.projected_inverse(), sq.window, settings);
    CHECK(report.best_rms <= 0.01);
    CHECK(report.best_rms <= report.initial_rms);
    for (std::size_t i = 1; i < report.records.size(); ++i)
      CHECK(report.records[i].rms <= report.records[i - 1].rms);
    CHECK(report.best_rms == report.records.back().rms);
  }
  SUBCASE("plant failures propagate with the iteration index") {
    std::size_t calls = 0;
    PlantEvaluator flaky = [&](const Waveform& drive, std::size_t) -> Waveform {
      if (++calls > 20) throw std::runtime_error("scope disconnected");
      return forward_amplify(drive.scaled(sq.seed_peak_w()), sq.amp);
    };
    LoopSettings settings;
    settings.width = sq.width;
    settings.tolerance = 1e-9;
    settings.max_iterations = 100;
    try {
      closed_loop_preshape(target, flaky, sq.projected_inverse(), sq.window, settings);
      FAIL("expected PlantError");
    } catch (const PlantError& e) {
      CHECK(e.iteration() > 0);
      CHECK(std::string(e.what()).find("scope disconnected") != std::string::npos);
    }
  }
  SUBCASE("invalid settings") {
    LoopSettings settings;
    settings.width = sq.width;
    settings.tolerance = 0.0;
    CHECK_THROWS_AS(closed_loop_preshape(target, make_simulated_plant(sq.plant(AomTransfer::sin2(), 0.0, 1)),
                                         sq.projected_inverse(), sq.window, settings),
                    ParameterError);
  }
}
