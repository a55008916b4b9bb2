#include "pulseforge/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pulseforge/errors.hpp"
#include "pulseforge/rng.hpp"
#include "pulseforge/simplex.hpp"

namespace pulseforge {

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double logit(double u) { return std::log(u / (1.0 - u)); }

}  // namespace

// --- drive family -----------------------------------------------------------

void PreshapeParams::validate(double width) const {
  const bool finite = std::isfinite(p_start) && std::isfinite(t_knee) && std::isfinite(p_knee) &&
                      std::isfinite(tau_exp) && std::isfinite(p_end);
  if (!finite) throw ParameterError("preshape parameters must be finite");
  if (!(width > 0.0)) throw ParameterError("pulse width must be > 0");
  if (!(0.0 <= p_start && p_start <= p_knee && p_knee <= p_end))
    throw ParameterError("preshape levels must satisfy 0 <= p_start <= p_knee <= p_end");
  if (!(t_knee > 0.0 && t_knee < width)) throw ParameterError("knee time must lie strictly inside the pulse");
  if (!(tau_exp > 0.0)) throw ParameterError("exponential time constant must be > 0");
}

double PreshapeParams::value_at(double t, double width) const noexcept {
  if (t < 0.0 || t >= width) return 0.0;
  // Written so that t == t_knee yields p_knee exactly.
  if (t <= t_knee) return p_knee - (p_knee - p_start) * ((t_knee - t) / t_knee);
  return p_end - (p_end - p_knee) * std::exp(-(t - t_knee) / tau_exp);
}

Waveform eval_preshape(const PreshapeParams& params, const TimeGrid& grid, double width) {
  params.validate(width);
  if (grid.t0() > 0.0 || width > grid.t_end() + grid.dt())
    throw ParameterError("pulse [0, width) must lie within the grid");
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) v[k] = params.value_at(grid.time(k), width);
  return Waveform(grid, std::move(v));
}

PreshapeCoordinates::PreshapeCoordinates(double width) : width_(width) {
  if (!(width > 0.0)) throw ParameterError("pulse width must be > 0");
}

PreshapeParams PreshapeCoordinates::to_params(std::span<const double> z) const {
  PreshapeParams p;
  p.p_start = std::abs(z[0]);
  p.p_knee = p.p_start + std::abs(z[1]);
  p.p_end = p.p_knee + std::abs(z[2]);
  // Keep the knee a hair away from both edges so validate() holds in floating point.
  p.t_knee = width_ * std::clamp(logistic(z[3]), 1e-9, 1.0 - 1e-9);
  p.tau_exp = width_ * std::exp(std::clamp(z[4], -40.0, 40.0));
  return p;
}

std::vector<double> PreshapeCoordinates::from_params(const PreshapeParams& p) const {
  const double u = std::clamp(p.t_knee / width_, 1e-9, 1.0 - 1e-9);
  return {p.p_start, p.p_knee - p.p_start, p.p_end - p.p_knee, logit(u), std::log(p.tau_exp / width_)};
}

std::vector<double> PreshapeCoordinates::default_steps() const { return {0.05, 0.05, 0.05, 0.5, 0.5}; }

PreshapeParams project_preshape(const Waveform& shape, double width) {
  const TimeGrid& grid = shape.grid();
  std::vector<std::size_t> inside;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid.time(k);
    if (t >= 0.0 && t < width) inside.push_back(k);
  }
  if (inside.size() < 5) throw DataError("too few samples inside the pulse to project onto the drive family");

  // Heuristic start: endpoints of the shape, knee at 30% of the pulse.
  const double first = shape[inside.front()];
  const double last = shape[inside.back()];
  const std::size_t knee_idx = inside[inside.size() * 3 / 10];
  PreshapeParams start;
  start.p_start = std::max(first, 0.0);
  start.p_knee = std::max(start.p_start, shape[knee_idx]);
  start.p_end = std::max(start.p_knee, last);
  start.t_knee = std::clamp(grid.time(knee_idx), 0.05 * width, 0.95 * width);
  start.tau_exp = 0.3 * width;

  const PreshapeCoordinates coords(width);
  const double scale = std::max(std::abs(last), std::abs(first)) + 1e-300;
  auto objective = [&](std::span<const double> z) {
    const PreshapeParams p = coords.to_params(z);
    double sum = 0.0;
    for (std::size_t k : inside) {
      const double d = p.value_at(grid.time(k), width) - shape[k];
      sum += d * d;
    }
    return sum / (scale * scale * static_cast<double>(inside.size()));
  };
  std::vector<double> steps = coords.default_steps();
  for (std::size_t i = 0; i < 3; ++i) steps[i] = 0.1 * scale;
  SimplexOptions opts;
  opts.max_iterations = 4000;
  opts.size_tolerance = 1e-10;
  // Restarting from the previous optimum escapes premature simplex collapse.
  std::vector<double> z = coords.from_params(start);
  for (int restart = 0; restart < 3; ++restart) {
    const SimplexResult r = minimize_simplex(objective, z, steps, opts);
    z = r.x;
  }
  return coords.to_params(z);
}

// --- plant ------------------------------------------------------------------

AomTransfer AomTransfer::identity() { return AomTransfer(Kind::identity); }

AomTransfer AomTransfer::sin2() { return AomTransfer(Kind::sin2); }

AomTransfer AomTransfer::table(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw ParameterError("transfer table needs at least 2 knots");
  if (knots.front().first != 0.0 || knots.front().second != 0.0)
    throw ParameterError("transfer table must start at (0, 0)");
  if (knots.back().first != 1.0) throw ParameterError("transfer table must end at drive 1");
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i].first > knots[i - 1].first)) throw ParameterError("transfer table drive values must increase");
    if (knots[i].second < knots[i - 1].second) throw ParameterError("transfer table must be nondecreasing");
  }
  for (const auto& [x, y] : knots)
    if (!(y >= 0.0 && y <= 1.0)) throw ParameterError("transfer table values must lie in [0, 1]");
  AomTransfer t(Kind::table);
  t.knots_ = std::move(knots);
  return t;
}

double AomTransfer::operator()(double drive) const noexcept {
  const double x = std::clamp(drive, 0.0, 1.0);
  switch (kind_) {
    case Kind::identity:
      return x;
    case Kind::sin2: {
      const double s = std::sin(0.5 * M_PI * x);
      return s * s;
    }
    case Kind::table: {
      const auto hi = std::upper_bound(knots_.begin(), knots_.end(), x,
                                       [](double v, const std::pair<double, double>& k) { return v < k.first; });
      if (hi == knots_.end()) return knots_.back().second;
      const auto lo = std::prev(hi);
      const double f = (x - lo->first) / (hi->first - lo->first);
      return lo->second + f * (hi->second - lo->second);
    }
  }
  return x;
}

void PlantConfig::validate() const {
  amp.validate();
  if (!(seed_peak_w > 0.0) || !std::isfinite(seed_peak_w)) throw ParameterError("seed_peak_w must be > 0");
  if (!(noise_rel_std >= 0.0) || !std::isfinite(noise_rel_std)) throw ParameterError("noise_rel_std must be >= 0");
}

PlantOutput simulate_plant(const Waveform& drive, const PlantConfig& cfg) {
  cfg.validate();
  bool clipped = false;
  std::vector<double> seed_power(drive.size());
  for (std::size_t k = 0; k < drive.size(); ++k) {
    const double d = drive[k];
    if (d < 0.0 || d > 1.0) clipped = true;
    seed_power[k] = cfg.seed_peak_w * cfg.transfer(std::clamp(d, 0.0, 1.0));
  }
  Waveform amplified = forward_amplify(Waveform(drive.grid(), std::move(seed_power)), cfg.amp);
  if (cfg.noise_rel_std == 0.0) return {std::move(amplified), clipped};

  StreamEngine engine = stream_engine(cfg.seed, 0);
  std::normal_distribution<double> normal(0.0, cfg.noise_rel_std);
  std::vector<double> noisy(amplified.samples().begin(), amplified.samples().end());
  for (double& v : noisy) v = std::max(0.0, v * (1.0 + normal(engine)));
  return {Waveform(drive.grid(), std::move(noisy)), clipped};
}

PlantEvaluator make_simulated_plant(PlantConfig cfg) {
  cfg.validate();
  return [cfg](const Waveform& drive, std::size_t evaluation) {
    PlantConfig shot = cfg;
    shot.seed = mix64(cfg.seed) ^ mix64(evaluation + 1);
    return simulate_plant(drive, shot).output;
  };
}

// --- amplifier fit ----------------------------------------------------------

namespace {

AmplifierParams fit_coords_to_params(std::span<const double> v) {
  // g0 = 1 is the boundary of the feasible set; clamp rather than reflect so it is reachable exactly.
  return AmplifierParams{std::exp(std::max(v[0], 0.0)), std::exp(v[1])};
}

}  // namespace

FitResult fit_amplifier_params(std::span<const FitPair> pairs, const AmplifierParams& init, const FitOptions& options) {
  if (pairs.empty()) throw DataError("amplifier fit needs at least one input/output pair");
  init.validate();
  std::vector<WindowSpec> windows;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const FitPair& pair = pairs[i];
    if (!pair.input.grid().matches(pair.output.grid())) throw GridError("fit pair input and output grids differ");
    if (!pair.input.is_nonnegative() || !pair.output.is_nonnegative())
      throw DataError("fit pair waveforms must be nonnegative");
    if (total_energy(pair.input) <= 0.0 || total_energy(pair.output) <= 0.0) {
      std::ostringstream os;
      os << "fit pair " << i << " carries zero energy";
      throw DataError(os.str());
    }
    windows.emplace_back(pair.input.grid().t0(), pair.input.grid().t_end());
  }

  auto objective = [&](std::span<const double> v) {
    const AmplifierParams p = fit_coords_to_params(v);
    double sum = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i)
      sum += rms_deviation(forward_amplify(pairs[i].input, p), pairs[i].output, windows[i], false);
    return sum;
  };

  SimplexOptions opts;
  opts.max_iterations = options.max_iterations;
  opts.size_tolerance = options.size_tolerance;
  const SimplexResult r =
      minimize_simplex(objective, {std::log(init.g0), std::log(init.e_sat)}, {0.25, 0.25}, opts);

  FitResult out;
  out.params = fit_coords_to_params(r.x);
  out.residual_rms = r.value;
  out.iterations = r.iterations;
  out.converged = r.converged;
  return out;
}

// --- closed loop ------------------------------------------------------------

std::pair<PreshapeParams, LoopReport> closed_loop_preshape(const Waveform& target, const PlantEvaluator& plant,
                                                           const PreshapeParams& init, const WindowSpec& win,
                                                           const LoopSettings& settings) {
  if (!(settings.tolerance > 0.0)) throw ParameterError("loop tolerance must be > 0");
  init.validate(settings.width);
  if (!target.is_nonnegative()) throw InputError("target waveform has negative samples");
  window_mean(target, win);  // rejects windows outside the grid or without samples

  const TimeGrid& grid = target.grid();
  const PreshapeCoordinates coords(settings.width);
  std::size_t iteration = 0;

  // Every call gets its own evaluation index so noisy plants draw fresh noise.
  std::size_t evaluation = 0;
  auto counted = [&](std::span<const double> z) {
    const Waveform drive = eval_preshape(coords.to_params(z), grid, settings.width);
    Waveform measured = Waveform(grid);
    try {
      measured = plant(drive, evaluation++);
    } catch (const std::exception& e) {
      throw PlantError(std::string("plant evaluation failed: ") + e.what(), iteration);
    }
    if (!measured.grid().matches(grid)) throw PlantError("plant returned a waveform on a different grid", iteration);
    return rms_deviation(measured, target, win, true);
  };

  LoopReport report;
  const std::vector<double> z0 = coords.from_params(init);

  // Evaluate the initial point alone first: a perfect start terminates without building a simplex.
  const double initial_rms = counted(z0);
  report.initial_rms = initial_rms;
  auto record = [&](const PreshapeParams& p, double rms) {
    LoopRecord rec{iteration, p, rms, evaluation};
    report.records.push_back(rec);
    if (settings.on_iteration) settings.on_iteration(rec, eval_preshape(p, grid, settings.width));
  };
  // Round-trip through the coordinates so the reported point is the one evaluated.
  const PreshapeParams init_eval = coords.to_params(z0);
  record(init_eval, initial_rms);
  report.best_params = init_eval;
  report.best_rms = initial_rms;

  if (initial_rms > settings.tolerance && settings.max_iterations > 0) {
    NelderMead nm(counted, z0, coords.default_steps());
    auto update_best = [&]() {
      if (nm.best_value() < report.best_rms) {
        report.best_rms = nm.best_value();
        report.best_params = coords.to_params(nm.best_point());
      }
    };
    update_best();
    while (report.best_rms > settings.tolerance && iteration < settings.max_iterations) {
      ++iteration;
      nm.iterate();
      update_best();
      record(report.best_params, report.best_rms);
    }
  }
  report.evaluations = evaluation;
  report.reached_tolerance = report.best_rms <= settings.tolerance;
  return {report.best_params, std::move(report)};
}

}  // namespace pulseforge
