#include "pulseforge/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pulseforge/errors.hpp"

namespace pulseforge {

NelderMead::NelderMead(Objective objective, std::vector<double> start, std::vector<double> steps)
    : objective_(std::move(objective)), dim_(start.size()) {
  if (dim_ == 0 || steps.size() != dim_) throw ParameterError("simplex needs a nonempty start and one step per dimension");
  // Gao & Han coefficients; they reduce to the classic 1/2/0.5/0.5 set in 2-D.
  const double n = static_cast<double>(dim_);
  reflect_ = 1.0;
  expand_ = 1.0 + 2.0 / n;
  contract_ = 0.75 - 0.5 / n;
  shrink_ = 1.0 - 1.0 / n;

  vertices_.reserve(dim_ + 1);
  vertices_.push_back({start, evaluate(start)});
  for (std::size_t i = 0; i < dim_; ++i) {
    std::vector<double> x = start;
    x[i] += steps[i];
    const double f = evaluate(x);
    vertices_.push_back({std::move(x), f});
  }
  sort();
}

double NelderMead::evaluate(std::span<const double> x) {
  ++evaluations_;
  const double f = objective_(x);
  return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
}

void NelderMead::sort() {
  std::stable_sort(vertices_.begin(), vertices_.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
}

std::vector<double> NelderMead::centroid() const {
  std::vector<double> c(dim_, 0.0);
  for (std::size_t v = 0; v < dim_; ++v)
    for (std::size_t i = 0; i < dim_; ++i) c[i] += vertices_[v].x[i];
  for (double& ci : c) ci /= static_cast<double>(dim_);
  return c;
}

NelderMead::Vertex NelderMead::towards(const std::vector<double>& origin, const std::vector<double>& through,
                                       double factor) {
  std::vector<double> x(dim_);
  for (std::size_t i = 0; i < dim_; ++i) x[i] = origin[i] + factor * (through[i] - origin[i]);
  const double f = evaluate(x);
  return {std::move(x), f};
}

void NelderMead::iterate() {
  ++iterations_;
  const std::vector<double> c = centroid();
  Vertex& worst = vertices_.back();
  const double f_best = vertices_.front().f;
  const double f_second_worst = vertices_[dim_ - 1].f;

  Vertex reflected = towards(c, worst.x, -reflect_);
  if (reflected.f < f_best) {
    Vertex expanded = towards(c, reflected.x, expand_);
    worst = expanded.f < reflected.f ? std::move(expanded) : std::move(reflected);
  } else if (reflected.f < f_second_worst) {
    worst = std::move(reflected);
  } else {
    // Outside contraction when the reflection beat the worst point, inside otherwise.
    const bool outside = reflected.f < worst.f;
    Vertex contracted = outside ? towards(c, reflected.x, contract_) : towards(c, worst.x, contract_);
    const double bound = outside ? reflected.f : worst.f;
    if (contracted.f <= bound) {
      worst = std::move(contracted);
    } else {
      const std::vector<double> best = vertices_.front().x;
      for (std::size_t v = 1; v <= dim_; ++v) vertices_[v] = towards(best, vertices_[v].x, shrink_);
    }
  }
  sort();
}

double NelderMead::size() const noexcept {
  double s = 0.0;
  const auto& best = vertices_.front().x;
  for (std::size_t v = 1; v <= dim_; ++v)
    for (std::size_t i = 0; i < dim_; ++i) s = std::max(s, std::abs(vertices_[v].x[i] - best[i]));
  return s;
}

double NelderMead::value_spread() const noexcept { return vertices_.back().f - vertices_.front().f; }

SimplexResult minimize_simplex(const NelderMead::Objective& objective, std::vector<double> start,
                               std::vector<double> steps, const SimplexOptions& options) {
  NelderMead nm(objective, std::move(start), std::move(steps));
  bool converged = nm.best_value() <= options.target_value;
  while (!converged && nm.iterations() < options.max_iterations) {
    nm.iterate();
    converged = nm.size() < options.size_tolerance || nm.best_value() <= options.target_value;
  }
  SimplexResult r;
  r.x.assign(nm.best_point().begin(), nm.best_point().end());
  r.value = nm.best_value();
  r.iterations = nm.iterations();
  r.evaluations = nm.evaluations();
  r.converged = converged;
  return r;
}

}  // namespace pulseforge
