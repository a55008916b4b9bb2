#include "pulseforge/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pulseforge/errors.hpp"

namespace pulseforge {

namespace {

void require_finite(std::span<const double> samples) {
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!std::isfinite(samples[k])) {
      std::ostringstream os;
      os << "non-finite sample at index " << k;
      throw InputError(os.str());
    }
  }
}

void require_same_grid(const Waveform& a, const Waveform& b) {
  if (!a.grid().matches(b.grid())) throw GridError("waveforms are sampled on different grids");
}

// Sample index range [first, last] inside the window, or first > last if empty.
std::pair<std::size_t, std::size_t> window_indices(const TimeGrid& grid, const WindowSpec& win) {
  const double slack = 1e-9 * grid.dt();
  if (win.start() < grid.t0() - slack || win.end() > grid.t_end() + slack) {
    std::ostringstream os;
    os << "window [" << win.start() << ", " << win.end() << "] s lies outside the grid span ["
       << grid.t0() << ", " << grid.t_end() << "] s";
    throw WindowError(os.str());
  }
  const double lo = std::ceil((win.start() - grid.t0()) / grid.dt() - 1e-9);
  const double hi = std::floor((win.end() - grid.t0()) / grid.dt() + 1e-9);
  const auto first = static_cast<std::size_t>(std::max(lo, 0.0));
  const auto last = static_cast<std::size_t>(std::min(hi, static_cast<double>(grid.size() - 1)));
  if (lo > hi || first > last) throw WindowError("window contains no samples");
  return {first, last};
}

}  // namespace

TimeGrid::TimeGrid(double t0, double dt, std::size_t n) : t0_(t0), dt_(dt), n_(n) {
  if (!std::isfinite(t0) || !std::isfinite(dt) || !(dt > 0.0)) throw GridError("grid requires finite t0 and dt > 0");
  if (n < 2) throw GridError("grid requires at least 2 samples");
}

bool TimeGrid::matches(const TimeGrid& other) const noexcept {
  if (n_ != other.n_) return false;
  const double tol = 1e-9 * dt_;
  return std::abs(t0_ - other.t0_) <= tol && std::abs(t_end() - other.t_end()) <= tol;
}

Waveform::Waveform(TimeGrid grid, std::vector<double> samples) : grid_(grid), samples_(std::move(samples)) {
  if (samples_.size() != grid_.size()) {
    std::ostringstream os;
    os << "sample count " << samples_.size() << " does not match grid size " << grid_.size();
    throw GridError(os.str());
  }
  require_finite(samples_);
}

Waveform::Waveform(TimeGrid grid) : grid_(grid), samples_(grid.size(), 0.0) {}

bool Waveform::is_nonnegative() const noexcept {
  return std::all_of(samples_.begin(), samples_.end(), [](double v) { return v >= 0.0; });
}

double Waveform::max() const noexcept { return *std::max_element(samples_.begin(), samples_.end()); }

Waveform Waveform::scaled(double factor) const {
  std::vector<double> out(samples_);
  for (double& v : out) v *= factor;
  return Waveform(grid_, std::move(out));
}

WindowSpec::WindowSpec(double start, double end) : start_(start), end_(end) {
  if (!std::isfinite(start) || !std::isfinite(end) || !(start < end))
    throw WindowError("window requires finite start < end");
}

Waveform cumulative_energy(const Waveform& w) {
  const auto p = w.samples();
  std::vector<double> e(p.size());
  const double half_dt = 0.5 * w.grid().dt();
  double acc = 0.0;
  e[0] = 0.0;
  for (std::size_t k = 1; k < p.size(); ++k) {
    acc += half_dt * (p[k - 1] + p[k]);
    e[k] = acc;
  }
  return Waveform(w.grid(), std::move(e));
}

double total_energy(const Waveform& w) {
  const auto p = w.samples();
  const double half_dt = 0.5 * w.grid().dt();
  double acc = 0.0;
  for (std::size_t k = 1; k < p.size(); ++k) acc += half_dt * (p[k - 1] + p[k]);
  return acc;
}

double window_mean(const Waveform& w, const WindowSpec& win) {
  const auto [first, last] = window_indices(w.grid(), win);
  double sum = 0.0;
  for (std::size_t k = first; k <= last; ++k) sum += w[k];
  return sum / static_cast<double>(last - first + 1);
}

double rms_deviation(const Waveform& a, const Waveform& b, const WindowSpec& win, bool normalize) {
  require_same_grid(a, b);
  const auto [first, last] = window_indices(a.grid(), win);
  const auto count = static_cast<double>(last - first + 1);

  double mean_a = 0.0;
  double mean_b = 0.0;
  for (std::size_t k = first; k <= last; ++k) {
    mean_a += a[k];
    mean_b += b[k];
  }
  mean_a /= count;
  mean_b /= count;
  if (mean_b == 0.0 || (normalize && mean_a == 0.0))
    throw InputError("window mean is zero; relative RMS deviation is undefined");

  const double scale_a = normalize ? 1.0 / mean_a : 1.0;
  const double scale_b = normalize ? 1.0 / mean_b : 1.0;
  double sum_sq = 0.0;
  for (std::size_t k = first; k <= last; ++k) {
    const double d = scale_a * a[k] - scale_b * b[k];
    sum_sq += d * d;
  }
  const double reference = normalize ? 1.0 : mean_b;
  return std::sqrt(sum_sq / count) / std::abs(reference);
}

Waveform resample(const Waveform& w, const TimeGrid& grid) {
  if (w.grid() == grid) return w;
  const TimeGrid& src = w.grid();
  if (grid.t_end() < src.t0() || grid.t0() > src.t_end())
    throw GridError("target grid does not overlap the source span");

  std::vector<double> out(grid.size(), 0.0);
  const double last = static_cast<double>(src.size() - 1);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double u = (grid.time(k) - src.t0()) / src.dt();
    // Snap to coincident source samples so shared sample times are reproduced exactly.
    const double nearest = std::round(u);
    if (std::abs(u - nearest) <= 1e-9) u = nearest;
    if (u < 0.0 || u > last) continue;
    const double base = std::floor(u);
    const auto i = static_cast<std::size_t>(base);
    const double frac = u - base;
    if (frac == 0.0 || i + 1 >= src.size()) {
      out[k] = w[i];
    } else {
      out[k] = (1.0 - frac) * w[i] + frac * w[i + 1];
    }
  }
  return Waveform(grid, std::move(out));
}

}  // namespace pulseforge
