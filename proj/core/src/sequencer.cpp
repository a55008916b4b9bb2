#include "pulseforge/sequencer.hpp"

#include <cmath>
#include <sstream>

#include "pulseforge/errors.hpp"

namespace pulseforge {

void BurstConfig::validate() const {
  if (!(rep_rate > 0.0) || !std::isfinite(rep_rate)) throw ParameterError("burst repetition rate must be > 0");
  if (!(pulse_width > 0.0)) throw ParameterError("burst pulse width must be > 0");
  if (!(pulse_width < 1.0 / rep_rate)) {
    std::ostringstream os;
    os << "pulse width " << pulse_width << " s is not shorter than the period " << 1.0 / rep_rate << " s";
    throw ParameterError(os.str());
  }
  if (n_pulses < 1) throw ParameterError("burst needs at least one pulse");
  if (!std::isfinite(t_start)) throw ParameterError("burst start time must be finite");
}

void TtlWindow::validate() const {
  if (!(high_start < high_end)) throw ParameterError("TTL window requires high_start < high_end");
}

std::vector<Interval> generate_burst(const BurstConfig& cfg) {
  cfg.validate();
  std::vector<Interval> out;
  out.reserve(cfg.n_pulses);
  for (std::size_t k = 0; k < cfg.n_pulses; ++k)
    out.push_back({cfg.t_start + static_cast<double>(k) / cfg.rep_rate, cfg.pulse_width});
  return out;
}

Interval select_single_pulse(const std::vector<Interval>& burst, const TtlWindow& ttl) {
  ttl.validate();
  std::size_t count = 0;
  Interval chosen;
  for (const Interval& p : burst) {
    if (p.start >= ttl.high_start && p.end() <= ttl.high_end) {
      ++count;
      chosen = p;
    }
  }
  if (count != 1) {
    std::ostringstream os;
    os << (count == 0 ? "no pulse" : "ambiguous selection:") << ' ' << count
       << " pulses lie inside the TTL-high window [" << ttl.high_start << ", " << ttl.high_end << "] s";
    throw SelectionError(os.str(), count);
  }
  return chosen;
}

SequencePlan center_blue_pulse(const Interval& ir, const WindowSpec& ir_flat, double blue_width) {
  if (!(blue_width >= 0.0) || !std::isfinite(blue_width)) throw ParameterError("blue pulse width must be >= 0");
  if (ir_flat.start() < ir.start || ir_flat.end() > ir.end())
    throw TimingError("flat window is not contained in the IR pulse", 0.0);
  const double deficit = blue_width - ir_flat.width();
  if (deficit > 0.0) {
    std::ostringstream os;
    os << "blue pulse is " << deficit << " s longer than the flat window";
    throw TimingError(os.str(), deficit);
  }
  SequencePlan plan;
  plan.ir_pulse = ir;
  plan.flat_window = ir_flat;
  const double margin = 0.5 * (ir_flat.width() - blue_width);
  plan.margin_before = margin;
  plan.margin_after = margin;
  plan.blue_pulse = {ir_flat.start() + margin, blue_width};
  plan.overlap = plan.blue_pulse;
  plan.degenerate_blue = blue_width == 0.0;
  return plan;
}

}  // namespace pulseforge
