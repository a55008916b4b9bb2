#include "pulseforge/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace pulseforge::cli {

using nlohmann::json;

namespace {

const char* type_name(FieldType t) {
  switch (t) {
    case FieldType::number: return "a number";
    case FieldType::integer: return "a nonnegative integer";
    case FieldType::boolean: return "a boolean";
    case FieldType::string: return "a string";
    case FieldType::object: return "an object";
    case FieldType::transfer: return "a transfer name or a list of [drive, fraction] pairs";
  }
  return "?";
}

bool has_type(const json& v, FieldType t) {
  switch (t) {
    case FieldType::number: return v.is_number();
    case FieldType::integer: return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
    case FieldType::boolean: return v.is_boolean();
    case FieldType::string: return v.is_string();
    case FieldType::object: return v.is_object();
    case FieldType::transfer: return v.is_string() || v.is_array();
  }
  return false;
}

std::string qualified(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

// Rejects unknown keys, missing required keys and type mismatches.
void check_object(const json& obj, const std::string& section) {
  if (!obj.is_object()) throw ConfigError("'" + (section.empty() ? std::string("<root>") : section) + "' must be an object");
  const auto& fields = config_fields().at(section);
  for (const auto& [key, value] : obj.items()) {
    const auto it = std::find_if(fields.begin(), fields.end(), [&](const FieldSpec& f) { return f.name == key; });
    if (it == fields.end()) throw ConfigError("unknown key '" + qualified(section, key) + "'");
    if (!has_type(value, it->type))
      throw ConfigError("'" + qualified(section, key) + "' must be " + type_name(it->type));
  }
  for (const auto& f : fields)
    if (f.required && !obj.contains(f.name)) throw ConfigError("missing required key '" + qualified(section, f.name) + "'");
}

template <typename T>
std::optional<T> opt(const json& obj, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  return obj.at(key).get<T>();
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  return obj.contains(key) ? obj.at(key).get<T>() : fallback;
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(name) + " must be positive");
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError(std::string(name) + " must be nonnegative");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

AmplifierSection parse_amplifier(const json& j) {
  check_object(j, "amplifier");
  AmplifierSection a;
  a.g0 = opt<double>(j, "g0");
  a.e_sat_j = j.at("e_sat_j").get<double>();
  a.pump_w = opt<double>(j, "pump_w");
  a.pump_alpha_per_w = get_or(j, "pump_alpha_per_w", 0.0);
  a.pump_g_floor = get_or(j, "pump_g_floor", 1.0);
  if (a.g0.has_value() == a.pump_w.has_value())
    throw ConfigError("amplifier needs exactly one of 'g0' or 'pump_w'");
  if (a.pump_w && !j.contains("pump_alpha_per_w")) throw ConfigError("'amplifier.pump_w' requires 'pump_alpha_per_w'");
  a.params().validate();
  return a;
}

PlantSection parse_plant(const json& j) {
  check_object(j, "plant");
  PlantSection p;
  if (j.contains("transfer")) {
    const json& t = j.at("transfer");
    if (t.is_string()) {
      p.transfer_name = t.get<std::string>();
      if (p.transfer_name == "sin2") p.transfer = AomTransfer::sin2();
      else if (p.transfer_name == "identity") p.transfer = AomTransfer::identity();
      else throw ConfigError("'plant.transfer' must be \"sin2\", \"identity\" or a knot table");
    } else {
      std::vector<std::pair<double, double>> knots;
      for (const auto& k : t) {
        if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
          throw ConfigError("'plant.transfer' knots must be [drive, fraction] number pairs");
        knots.emplace_back(k[0].get<double>(), k[1].get<double>());
      }
      p.transfer = AomTransfer::table(std::move(knots));
      p.transfer_name = "table";
    }
  }
  p.seed_peak_w = opt<double>(j, "seed_peak_w");
  if (p.seed_peak_w) require_positive(*p.seed_peak_w, "plant.seed_peak_w");
  p.noise_rel_std = get_or(j, "noise_rel_std", 0.0);
  require_nonnegative(p.noise_rel_std, "plant.noise_rel_std");
  return p;
}

PreshapeSection parse_preshape(const json& j) {
  check_object(j, "preshape");
  PreshapeSection p;
  p.pulse_width_s = j.at("pulse_width_s").get<double>();
  require_positive(p.pulse_width_s, "preshape.pulse_width_s");
  p.target_level_w = get_or(j, "target_level_w", 0.0);
  require_nonnegative(p.target_level_w, "preshape.target_level_w");
  p.window_start_s = opt<double>(j, "window_start_s");
  p.window_end_s = opt<double>(j, "window_end_s");
  p.tolerance = get_or(j, "tolerance", 0.01);
  require_nonnegative(p.tolerance, "preshape.tolerance");
  p.max_iterations = get_or<std::size_t>(j, "max_iterations", 50);
  p.dump_iterations = get_or(j, "dump_iterations", false);
  try {
    (void)p.window();
  } catch (const WindowError& e) {
    throw ParameterError(std::string("preshape window: ") + e.what());
  }
  return p;
}

DynamicsSection parse_dynamics(const json& j) {
  check_object(j, "dynamics");
  DynamicsSection d;
  d.rabi_ref_hz = j.at("rabi_ref_hz").get<double>();
  d.p420_ref_w = get_or(j, "p420_ref_w", 1.0);
  d.p1013_ref_w = get_or(j, "p1013_ref_w", 1.0);
  d.p420_w = opt<double>(j, "p420_w");
  d.p1013_w = opt<double>(j, "p1013_w");
  d.intermediate_detuning_hz = get_or(j, "intermediate_detuning_hz", 1.69e9);
  d.two_photon_detuning_hz = get_or(j, "two_photon_detuning_hz", 0.0);
  d.rel_std_420 = get_or(j, "rel_std_420", 0.0);
  d.rel_std_1013 = get_or(j, "rel_std_1013", 0.0);
  d.temperature_k = get_or(j, "temperature_k", 0.0);
  d.shots = get_or<std::size_t>(j, "shots", 1);
  d.scan_start_s = get_or(j, "scan_start_s", 0.0);
  d.scan_stop_s = j.at("scan_stop_s").get<double>();
  d.scan_points = j.at("scan_points").get<std::size_t>();
  d.ramsey_offset_hz = get_or(j, "ramsey_offset_hz", 0.0);
  d.ramsey_second_phase_rad = get_or(j, "ramsey_second_phase_rad", 0.0);
  d.instantaneous_pulses = get_or(j, "instantaneous_pulses", false);
  if (j.contains("envelope")) d.envelope = envelope_from_string(j.at("envelope").get<std::string>());

  d.excitation().validate();
  d.noise(0).validate();
  require_nonnegative(d.scan_start_s, "dynamics.scan_start_s");
  if (!(d.scan_stop_s > d.scan_start_s)) throw ParameterError("dynamics.scan_stop_s must exceed scan_start_s");
  if (d.scan_points < 2) throw ParameterError("dynamics.scan_points must be at least 2");
  return d;
}

SequenceSection parse_sequence(const json& j) {
  check_object(j, "sequence");
  SequenceSection s;
  s.rep_rate_hz = j.at("rep_rate_hz").get<double>();
  s.pulse_width_s = j.at("pulse_width_s").get<double>();
  s.n_pulses = j.at("n_pulses").get<std::size_t>();
  s.t_start_s = get_or(j, "t_start_s", 0.0);
  s.ttl_high_start_s = j.at("ttl_high_start_s").get<double>();
  s.ttl_high_end_s = j.at("ttl_high_end_s").get<double>();
  s.flat_start_s = j.at("flat_start_s").get<double>();
  s.flat_end_s = j.at("flat_end_s").get<double>();
  s.blue_width_s = j.at("blue_width_s").get<double>();
  s.burst().validate();
  s.ttl().validate();
  require_nonnegative(s.blue_width_s, "sequence.blue_width_s");
  if (!(s.flat_start_s < s.flat_end_s)) throw ParameterError("sequence.flat_start_s must precede flat_end_s");
  return s;
}

IoSection parse_io(const json& j, const std::filesystem::path& base) {
  check_object(j, "io");
  IoSection io;
  if (auto p = opt<std::string>(j, "input_csv")) io.input_csv = resolve(base, *p);
  if (auto p = opt<std::string>(j, "target_csv")) io.target_csv = resolve(base, *p);
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    check_object(g, "io.grid");
    GridConfig gc{g.at("t0_s").get<double>(), g.at("dt_s").get<double>(), g.at("n").get<std::size_t>()};
    (void)gc.grid();
    io.grid = gc;
  }
  io.seed = get_or<std::uint64_t>(j, "seed", 0);
  return io;
}

}  // namespace

AmplifierParams AmplifierSection::params() const {
  if (g0) return {*g0, e_sat_j};
  return {pump_to_gain(pump_w.value_or(0.0), PumpMap{pump_alpha_per_w, pump_g_floor}), e_sat_j};
}

WindowSpec PreshapeSection::window() const {
  return WindowSpec(window_start_s.value_or(0.2 * pulse_width_s), window_end_s.value_or(0.9 * pulse_width_s));
}

ExcitationConfig DynamicsSection::excitation() const {
  ExcitationConfig c;
  c.omega_ref = constants::two_pi * rabi_ref_hz;
  c.p420_ref = p420_ref_w;
  c.p1013_ref = p1013_ref_w;
  c.p420 = p420_w.value_or(p420_ref_w);
  c.p1013 = p1013_w.value_or(p1013_ref_w);
  c.delta_int = constants::two_pi * intermediate_detuning_hz;
  c.delta_two = constants::two_pi * two_photon_detuning_hz;
  return c;
}

NoiseModel DynamicsSection::noise(std::uint64_t seed) const {
  NoiseModel n;
  n.rel_std_420 = rel_std_420;
  n.rel_std_1013 = rel_std_1013;
  n.temperature = temperature_k;
  n.shots = shots;
  n.seed = seed;
  return n;
}

RamseyOptions DynamicsSection::ramsey() const {
  RamseyOptions r;
  r.detuning_offset = constants::two_pi * ramsey_offset_hz;
  r.second_pulse_phase = ramsey_second_phase_rad;
  r.instantaneous_pulses = instantaneous_pulses;
  return r;
}

std::vector<double> DynamicsSection::scan() const {
  std::vector<double> x(scan_points);
  const double step = (scan_stop_s - scan_start_s) / static_cast<double>(scan_points - 1);
  for (std::size_t i = 0; i < scan_points; ++i) x[i] = scan_start_s + static_cast<double>(i) * step;
  x.back() = scan_stop_s;
  return x;
}

BurstConfig SequenceSection::burst() const { return {rep_rate_hz, pulse_width_s, n_pulses, t_start_s}; }

TtlWindow SequenceSection::ttl() const { return {ttl_high_start_s, ttl_high_end_s}; }

const std::map<std::string, std::vector<FieldSpec>>& config_fields() {
  using F = FieldType;
  static const std::map<std::string, std::vector<FieldSpec>> fields{
      {"",
       {{"version", F::integer, true},
        {"amplifier", F::object, false},
        {"plant", F::object, false},
        {"preshape", F::object, false},
        {"dynamics", F::object, false},
        {"sequence", F::object, false},
        {"io", F::object, false}}},
      {"amplifier",
       {{"g0", F::number, false},
        {"e_sat_j", F::number, true},
        {"pump_w", F::number, false},
        {"pump_alpha_per_w", F::number, false},
        {"pump_g_floor", F::number, false}}},
      {"plant", {{"transfer", F::transfer, false}, {"seed_peak_w", F::number, false}, {"noise_rel_std", F::number, false}}},
      {"preshape",
       {{"pulse_width_s", F::number, true},
        {"target_level_w", F::number, false},
        {"window_start_s", F::number, false},
        {"window_end_s", F::number, false},
        {"tolerance", F::number, false},
        {"max_iterations", F::integer, false},
        {"dump_iterations", F::boolean, false}}},
      {"dynamics",
       {{"rabi_ref_hz", F::number, true},
        {"p420_ref_w", F::number, false},
        {"p1013_ref_w", F::number, false},
        {"p420_w", F::number, false},
        {"p1013_w", F::number, false},
        {"intermediate_detuning_hz", F::number, false},
        {"two_photon_detuning_hz", F::number, false},
        {"rel_std_420", F::number, false},
        {"rel_std_1013", F::number, false},
        {"temperature_k", F::number, false},
        {"shots", F::integer, false},
        {"scan_start_s", F::number, false},
        {"scan_stop_s", F::number, true},
        {"scan_points", F::integer, true},
        {"ramsey_offset_hz", F::number, false},
        {"ramsey_second_phase_rad", F::number, false},
        {"instantaneous_pulses", F::boolean, false},
        {"envelope", F::string, false}}},
      {"sequence",
       {{"rep_rate_hz", F::number, true},
        {"pulse_width_s", F::number, true},
        {"n_pulses", F::integer, true},
        {"t_start_s", F::number, false},
        {"ttl_high_start_s", F::number, true},
        {"ttl_high_end_s", F::number, true},
        {"flat_start_s", F::number, true},
        {"flat_end_s", F::number, true},
        {"blue_width_s", F::number, true}}},
      {"io",
       {{"input_csv", F::string, false},
        {"target_csv", F::string, false},
        {"grid", F::object, false},
        {"seed", F::integer, false}}},
      {"io.grid", {{"t0_s", F::number, true}, {"dt_s", F::number, true}, {"n", F::integer, true}}},
  };
  return fields;
}

ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  check_object(doc, "");
  ScenarioConfig cfg;
  cfg.version = doc.at("version").get<int>();
  if (cfg.version != kConfigVersion)
    throw ConfigError("unsupported config version " + std::to_string(cfg.version) + " (expected " +
                      std::to_string(kConfigVersion) + ")");
  if (doc.contains("amplifier")) cfg.amplifier = parse_amplifier(doc.at("amplifier"));
  if (doc.contains("plant")) cfg.plant = parse_plant(doc.at("plant"));
  if (doc.contains("preshape")) cfg.preshape = parse_preshape(doc.at("preshape"));
  if (doc.contains("dynamics")) cfg.dynamics = parse_dynamics(doc.at("dynamics"));
  if (doc.contains("sequence")) cfg.sequence = parse_sequence(doc.at("sequence"));
  if (doc.contains("io")) cfg.io = parse_io(doc.at("io"), base_dir);
  return cfg;
}

std::pair<ScenarioConfig, std::string> load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  ScenarioConfig cfg = parse_config(text, path.parent_path());
  return {std::move(cfg), std::move(text)};
}

}  // namespace pulseforge::cli
