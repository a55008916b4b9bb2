#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace pulseforge {

// Derivative-free Nelder-Mead minimizer with dimension-adaptive coefficients.
// Non-finite objective values are treated as +infinity.
class NelderMead {
 public:
  using Objective = std::function<double(std::span<const double>)>;

  // Builds the initial simplex from `start` plus one vertex per axis offset by steps[i].
  NelderMead(Objective objective, std::vector<double> start, std::vector<double> steps);

  // One reflection/expansion/contraction/shrink step.
  void iterate();

  std::span<const double> best_point() const noexcept { return vertices_.front().x; }
  double best_value() const noexcept { return vertices_.front().f; }

  // Largest infinity-norm distance of any vertex from the best one.
  double size() const noexcept;
  // Spread of objective values across the simplex.
  double value_spread() const noexcept;

  std::size_t iterations() const noexcept { return iterations_; }
  std::size_t evaluations() const noexcept { return evaluations_; }
  std::size_t dimension() const noexcept { return dim_; }

 private:
  struct Vertex {
    std::vector<double> x;
    double f;
  };

  double evaluate(std::span<const double> x);
  void sort();
  std::vector<double> centroid() const;
  Vertex towards(const std::vector<double>& origin, const std::vector<double>& through, double factor);

  Objective objective_;
  std::size_t dim_;
  std::vector<Vertex> vertices_;
  std::size_t iterations_ = 0;
  std::size_t evaluations_ = 0;
  double reflect_;
  double expand_;
  double contract_;
  double shrink_;
};

struct SimplexOptions {
  std::size_t max_iterations = 500;
  double size_tolerance = 1e-8;
  // Stop when the objective drops to or below this value.
  double target_value = -std::numeric_limits<double>::infinity();
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

SimplexResult minimize_simplex(const NelderMead::Objective& objective, std::vector<double> start,
                               std::vector<double> steps, const SimplexOptions& options = {});

}  // namespace pulseforge
