#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace pulseforge {

// Uniform time grid. Sample k sits at t0 + k*dt, always computed directly.
class TimeGrid {
 public:
  TimeGrid(double t0, double dt, std::size_t n);

  double t0() const noexcept { return t0_; }
  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return n_; }

  double time(std::size_t k) const noexcept { return t0_ + static_cast<double>(k) * dt_; }
  double t_end() const noexcept { return time(n_ - 1); }

  // Exact equality of all three fields.
  bool operator==(const TimeGrid&) const = default;

  // Same sample count and sample times equal to within 1e-9 of a step. Grids
  // read back from CSV differ from their source in the last bits of dt.
  bool matches(const TimeGrid& other) const noexcept;

 private:
  double t0_;
  double dt_;
  std::size_t n_;
};

// Sampled power trace in watts (or joules for cumulative energy traces).
// Construction rejects non-finite samples; physical traces are additionally
// required to be nonnegative by the operations that need it.
class Waveform {
 public:
  Waveform(TimeGrid grid, std::vector<double> samples);
  // All-zero trace on the grid.
  explicit Waveform(TimeGrid grid);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t k) const noexcept { return samples_[k]; }
  double time(std::size_t k) const noexcept { return grid_.time(k); }

  bool is_nonnegative() const noexcept;
  double max() const noexcept;

  Waveform scaled(double factor) const;

 private:
  TimeGrid grid_;
  std::vector<double> samples_;
};

// Closed time interval [start, end] used for metrics.
class WindowSpec {
 public:
  WindowSpec(double start, double end);

  double start() const noexcept { return start_; }
  double end() const noexcept { return end_; }
  double width() const noexcept { return end_ - start_; }
  double center() const noexcept { return 0.5 * (start_ + end_); }
  bool contains(double t) const noexcept { return t >= start_ && t <= end_; }

 private:
  double start_;
  double end_;
};

// Trapezoidal running integral; result[0] == 0.
Waveform cumulative_energy(const Waveform& w);

// Final value of cumulative_energy without materializing the trace.
double total_energy(const Waveform& w);

// Windowed RMS of (a - b) divided by the window mean of b. With normalize set
// both traces are first divided by their own window mean.
double rms_deviation(const Waveform& a, const Waveform& b, const WindowSpec& win, bool normalize);

// Linear interpolation onto `grid`; zero outside the source span.
Waveform resample(const Waveform& w, const TimeGrid& grid);

// Mean of the samples that fall inside the window. Throws WindowError if none do.
double window_mean(const Waveform& w, const WindowSpec& win);

// Two-column CSV (time_s, power_w). Header line optional on read, always
// written. Precision is 17 significant digits.
Waveform read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const Waveform& w);

// Relative jitter accepted on the time column before the file is rejected.
inline constexpr double kCsvTimeJitterTolerance = 1e-9;

}  // namespace pulseforge
