#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pulseforge/amplifier.hpp"
#include "pulseforge/calibration.hpp"
#include "pulseforge/damped_fit.hpp"
#include "pulseforge/errors.hpp"
#include "pulseforge/rydberg.hpp"
#include "pulseforge/sequencer.hpp"
#include "pulseforge/waveform.hpp"

namespace pulseforge::cli {

// Malformed or schema-violating scenario document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kConfigVersion = 1;

struct GridConfig {
  double t0_s = 0.0;
  double dt_s = 0.0;
  std::size_t n = 0;

  TimeGrid grid() const { return TimeGrid(t0_s, dt_s, n); }
};

struct AmplifierSection {
  std::optional<double> g0;
  double e_sat_j = 0.0;
  std::optional<double> pump_w;
  double pump_alpha_per_w = 0.0;
  double pump_g_floor = 1.0;

  // g0 taken directly or through the pump map.
  AmplifierParams params() const;
};

struct PlantSection {
  AomTransfer transfer = AomTransfer::sin2();
  std::string transfer_name = "sin2";
  std::optional<double> seed_peak_w;  // derived from the analytic inverse when absent
  double noise_rel_std = 0.0;
};

struct PreshapeSection {
  double pulse_width_s = 0.0;
  double target_level_w = 0.0;
  std::optional<double> window_start_s;  // default 0.2 * width
  std::optional<double> window_end_s;    // default 0.9 * width
  double tolerance = 0.01;
  std::size_t max_iterations = 50;
  bool dump_iterations = false;

  WindowSpec window() const;
};

struct DynamicsSection {
  double rabi_ref_hz = 0.0;  // Omega / 2 pi at the reference powers
  double p420_ref_w = 1.0;
  double p1013_ref_w = 1.0;
  std::optional<double> p420_w;
  std::optional<double> p1013_w;
  double intermediate_detuning_hz = 1.69e9;
  double two_photon_detuning_hz = 0.0;
  double rel_std_420 = 0.0;
  double rel_std_1013 = 0.0;
  double temperature_k = 0.0;
  std::size_t shots = 1;
  double scan_start_s = 0.0;
  double scan_stop_s = 0.0;
  std::size_t scan_points = 0;
  double ramsey_offset_hz = 0.0;
  double ramsey_second_phase_rad = 0.0;
  bool instantaneous_pulses = false;
  std::optional<EnvelopeKind> envelope;

  ExcitationConfig excitation() const;
  NoiseModel noise(std::uint64_t seed) const;
  RamseyOptions ramsey() const;
  std::vector<double> scan() const;
};

struct SequenceSection {
  double rep_rate_hz = 2e3;
  double pulse_width_s = 0.0;
  std::size_t n_pulses = 1;
  double t_start_s = 0.0;
  double ttl_high_start_s = 0.0;
  double ttl_high_end_s = 0.0;
  // Flat top of the IR pulse, relative to the selected pulse's start.
  double flat_start_s = 0.0;
  double flat_end_s = 0.0;
  double blue_width_s = 0.0;

  BurstConfig burst() const;
  TtlWindow ttl() const;
};

struct IoSection {
  std::optional<std::filesystem::path> input_csv;   // resolved against the config directory
  std::optional<std::filesystem::path> target_csv;
  std::optional<GridConfig> grid;
  std::uint64_t seed = 0;
};

struct ScenarioConfig {
  int version = kConfigVersion;
  std::optional<AmplifierSection> amplifier;
  std::optional<PlantSection> plant;
  std::optional<PreshapeSection> preshape;
  std::optional<DynamicsSection> dynamics;
  std::optional<SequenceSection> sequence;
  IoSection io;
};

// Parses and validates a scenario. Relative paths are resolved against
// base_dir. Throws ConfigError on unknown keys, wrong types or missing
// required fields, and ParameterError on physically invalid values.
ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

// Reads the file and parses it. The raw bytes are returned for hashing.
std::pair<ScenarioConfig, std::string> load_config(const std::filesystem::path& path);

enum class FieldType { number, integer, boolean, string, object, transfer };

struct FieldSpec {
  std::string name;
  FieldType type;
  bool required;
};

// Accepted keys per section ("" is the document root). The published JSON
// schema is checked against this table.
const std::map<std::string, std::vector<FieldSpec>>& config_fields();

}  // namespace pulseforge::cli
