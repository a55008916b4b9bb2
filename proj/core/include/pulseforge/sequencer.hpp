#pragma once

#include <cstddef>
#include <vector>

#include "pulseforge/waveform.hpp"

namespace pulseforge {

// Half-open time interval [start, start + width).
struct Interval {
  double start = 0.0;
  double width = 0.0;

  double end() const noexcept { return start + width; }
  double center() const noexcept { return start + 0.5 * width; }
  bool operator==(const Interval&) const = default;
};

struct BurstConfig {
  double rep_rate = 2e3;  // Hz
  double pulse_width = 1e-6;
  std::size_t n_pulses = 1;
  double t_start = 0.0;

  void validate() const;
};

struct TtlWindow {
  double high_start = 0.0;
  double high_end = 0.0;

  void validate() const;
};

struct SequencePlan {
  Interval ir_pulse;
  Interval blue_pulse;
  Interval overlap;
  WindowSpec flat_window{0.0, 1.0};
  // Equal by construction: both are (flat width - blue width) / 2.
  double margin_before = 0.0;
  double margin_after = 0.0;
  bool degenerate_blue = false;  // zero-length blue pulse
};

// n_pulses intervals; pulse k starts at t_start + k / rep_rate.
std::vector<Interval> generate_burst(const BurstConfig& cfg);

// The single pulse lying entirely inside the TTL-high window. Throws
// SelectionError carrying the number of qualifying pulses if it is not 1.
Interval select_single_pulse(const std::vector<Interval>& burst, const TtlWindow& ttl);

// Centers a blue pulse of the given width on the flat-top window of the IR pulse.
SequencePlan center_blue_pulse(const Interval& ir, const WindowSpec& ir_flat, double blue_width);

}  // namespace pulseforge
