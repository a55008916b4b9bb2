#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "pulseforge/amplifier.hpp"
#include "pulseforge/waveform.hpp"

namespace pulseforge {

// Drive-waveform family: a linear rise from p_start to p_knee over
// [0, t_knee], then an exponential approach from p_knee towards p_end with
// time constant tau_exp, zero outside [0, width). Levels are in normalized
// drive units.
struct PreshapeParams {
  double p_start = 0.0;
  double t_knee = 0.0;
  double p_knee = 0.0;
  double tau_exp = 0.0;
  double p_end = 0.0;

  void validate(double width) const;
  double value_at(double t, double width) const noexcept;
};

Waveform eval_preshape(const PreshapeParams& params, const TimeGrid& grid, double width);

// Least-squares projection of a sampled drive shape onto the family over [0, width).
PreshapeParams project_preshape(const Waveform& shape, double width);

// Map from unconstrained optimizer coordinates onto valid PreshapeParams.
// Keeps 0 <= p_start <= p_knee <= p_end, 0 < t_knee < width and tau_exp > 0.
class PreshapeCoordinates {
 public:
  explicit PreshapeCoordinates(double width);
  PreshapeParams to_params(std::span<const double> z) const;
  std::vector<double> from_params(const PreshapeParams& p) const;
  // Initial simplex offsets.
  std::vector<double> default_steps() const;

 private:
  double width_;
};

// RF-drive to optical-power-fraction map of the modulator.
class AomTransfer {
 public:
  enum class Kind { identity, sin2, table };

  static AomTransfer identity();
  // sin^2(pi x / 2)
  static AomTransfer sin2();
  // Piecewise-linear through (x, y) knots; must start at (0, 0), span [0, 1]
  // in x and be nondecreasing.
  static AomTransfer table(std::vector<std::pair<double, double>> knots);

  double operator()(double drive) const noexcept;
  Kind kind() const noexcept { return kind_; }
  const std::vector<std::pair<double, double>>& knots() const noexcept { return knots_; }

 private:
  explicit AomTransfer(Kind kind) : kind_(kind) {}
  Kind kind_;
  std::vector<std::pair<double, double>> knots_;
};

struct PlantConfig {
  AmplifierParams amp;
  AomTransfer transfer = AomTransfer::sin2();
  double seed_peak_w = 1.0;  // seed power at full drive
  double noise_rel_std = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PlantOutput {
  Waveform output;
  bool clipped = false;  // drive left [0, 1] somewhere and was clipped
};

// Modulator transfer, seed scaling, amplifier, then multiplicative Gaussian
// detector noise drawn from cfg.seed.
PlantOutput simulate_plant(const Waveform& drive, const PlantConfig& cfg);

// Opaque drive -> measured output evaluator. `evaluation` is a running index
// the loop passes so stochastic plants can derive independent noise streams.
using PlantEvaluator = std::function<Waveform(const Waveform& drive, std::size_t evaluation)>;

// simulate_plant with the noise seed derived from (cfg.seed, evaluation).
PlantEvaluator make_simulated_plant(PlantConfig cfg);

struct FitResult {
  AmplifierParams params;
  double residual_rms = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct FitPair {
  Waveform input;
  Waveform output;
};

struct FitOptions {
  std::size_t max_iterations = 500;
  double size_tolerance = 1e-8;  // simplex size in log-parameter space
};

// Simplex search over (log g0, log e_sat) minimizing the summed relative RMS
// between forward_amplify(input) and output over each pair's full span.
FitResult fit_amplifier_params(std::span<const FitPair> pairs, const AmplifierParams& init, const FitOptions& options = {});

struct LoopRecord {
  std::size_t iteration = 0;  // 0 is the initial point
  PreshapeParams params;      // best so far
  double rms = 0.0;           // best so far
  std::size_t evaluations = 0;
};

struct LoopReport {
  std::vector<LoopRecord> records;
  PreshapeParams best_params;
  double best_rms = 0.0;
  double initial_rms = 0.0;
  std::size_t evaluations = 0;
  bool reached_tolerance = false;

  std::size_t iterations() const noexcept { return records.size(); }
};

struct LoopSettings {
  double width = 0.0;  // pulse width the family is evaluated over
  double tolerance = 0.01;
  std::size_t max_iterations = 50;
  // Called after every simplex iteration with the best drive so far.
  std::function<void(const LoopRecord&, const Waveform& drive)> on_iteration;
};

// Closed-loop refinement of the drive family against a plant: simplex search
// over the five shape parameters minimizing the window-normalized RMS between
// the plant output and the target.
std::pair<PreshapeParams, LoopReport> closed_loop_preshape(const Waveform& target, const PlantEvaluator& plant,
                                                           const PreshapeParams& init, const WindowSpec& win,
                                                           const LoopSettings& settings);

}  // namespace pulseforge
