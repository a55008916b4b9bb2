#include "pulseforge/amplifier.hpp"

#include <cmath>
#include <sstream>

#include "pulseforge/errors.hpp"

namespace pulseforge {

namespace {

void require_physical(const Waveform& w, const char* what) {
  if (!w.is_nonnegative()) throw InputError(std::string(what) + " waveform has negative samples");
}

}  // namespace

void AmplifierParams::validate() const {
  if (!std::isfinite(g0) || g0 < 1.0) {
    std::ostringstream os;
    os << "small-signal gain g0 = " << g0 << " must be finite and >= 1";
    throw ParameterError(os.str());
  }
  if (!std::isfinite(e_sat) || !(e_sat > 0.0)) {
    std::ostringstream os;
    os << "saturation energy e_sat = " << e_sat << " J must be finite and > 0";
    throw ParameterError(os.str());
  }
}

void GainMediumMicro::validate() const {
  const bool ok = std::isfinite(sigma) && sigma > 0.0 && std::isfinite(column_inversion) && column_inversion >= 0.0 &&
                  std::isfinite(photon_energy) && photon_energy > 0.0;
  if (!ok) throw ParameterError("gain medium requires sigma > 0, column_inversion >= 0, photon_energy > 0");
}

AmplifierParams micro_to_reduced(const GainMediumMicro& m, double mode_area_m2) {
  m.validate();
  if (!(mode_area_m2 > 0.0) || !std::isfinite(mode_area_m2)) throw ParameterError("mode area must be > 0");
  AmplifierParams p;
  p.g0 = std::exp(m.sigma * m.column_inversion);
  p.e_sat = m.photon_energy / (2.0 * m.sigma) * mode_area_m2;
  return p;
}

GainMediumMicro reduced_to_micro(const AmplifierParams& p, double photon_energy_j, double mode_area_m2) {
  p.validate();
  if (!(mode_area_m2 > 0.0) || !(photon_energy_j > 0.0)) throw ParameterError("mode area and photon energy must be > 0");
  GainMediumMicro m;
  m.photon_energy = photon_energy_j;
  m.sigma = photon_energy_j * mode_area_m2 / (2.0 * p.e_sat);
  m.column_inversion = std::log(p.g0) / m.sigma;
  return m;
}

Waveform forward_amplify(const Waveform& input, const AmplifierParams& p) {
  p.validate();
  require_physical(input, "input");
  if (p.g0 == 1.0) return input;

  const auto in = input.samples();
  const double depletion = 1.0 - 1.0 / p.g0;
  const double half_dt = 0.5 * input.grid().dt();
  std::vector<double> out(in.size());
  double energy = 0.0;
  for (std::size_t k = 0; k < in.size(); ++k) {
    if (k > 0) energy += half_dt * (in[k - 1] + in[k]);
    out[k] = in[k] / (1.0 - depletion * std::exp(-energy / p.e_sat));
  }
  return Waveform(input.grid(), std::move(out));
}

double output_energy(double input_energy_j, const AmplifierParams& p) {
  p.validate();
  if (!(input_energy_j >= 0.0)) throw InputError("input energy must be >= 0");
  if (p.g0 == 1.0) return input_energy_j;
  // log1p/expm1 keep the small-signal regime accurate.
  return p.e_sat * std::log1p(p.g0 * std::expm1(input_energy_j / p.e_sat));
}

double output_energy(const Waveform& input, const AmplifierParams& p) {
  require_physical(input, "input");
  return output_energy(total_energy(input), p);
}

Waveform inverse_preshape(const Waveform& target, const AmplifierParams& p) {
  p.validate();
  require_physical(target, "target");
  if (p.g0 == 1.0) return target;

  const auto out = target.samples();
  const double growth = 1.0 - p.g0;
  const double half_dt = 0.5 * target.grid().dt();
  std::vector<double> in(out.size());
  double energy = 0.0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k > 0) energy += half_dt * (out[k - 1] + out[k]);
    const double denom = 1.0 - growth * std::exp(-energy / p.e_sat);
    if (!(denom > 0.0)) {
      std::ostringstream os;
      os << "inversion denominator " << denom << " is not positive at sample " << k;
      throw InversionError(os.str());
    }
    in[k] = out[k] / denom;
  }
  return Waveform(target.grid(), std::move(in));
}

double pump_to_gain(double pump_w, const PumpMap& map) {
  if (!(pump_w >= 0.0)) throw ParameterError("pump power must be >= 0");
  if (!(map.alpha >= 0.0) || !(map.g_floor >= 1.0)) throw ParameterError("pump map requires alpha >= 0 and g_floor >= 1");
  return map.g_floor * std::exp(map.alpha * pump_w);
}

}  // namespace pulseforge
