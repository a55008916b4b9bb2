#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include "pulseforge/cli/cli.hpp"

namespace pulseforge::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Files written by a command, in write order, relative to the output directory.
class Manifest {
 public:
  explicit Manifest(fs::path dir) : dir_(std::move(dir)) {}

  fs::path add(const std::string& name) {
    files_.push_back(name);
    const fs::path p = dir_ / name;
    fs::create_directories(p.parent_path());
    return p;
  }
  const std::vector<std::string>& files() const noexcept { return files_; }
  const fs::path& dir() const noexcept { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

int print_plan(const Context& ctx, const std::vector<std::string>& files) {
  *ctx.out << "dry run: configuration valid; planned outputs in " << ctx.out_dir.string() << "\n";
  for (const auto& f : files) *ctx.out << "  " << f << "\n";
  *ctx.out << "  summary.json\n";
  return kExitOk;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write '" + path.string() + "'");
  f << doc.dump(2) << "\n";
  if (!f) throw DataError("failed writing '" + path.string() + "'");
}

void write_summary(const Context& ctx, const Manifest& m, const std::string& command, json parameters, json metrics) {
  json s;
  s["command"] = command;
  s["config_sha256"] = ctx.config_sha256;
  s["seed"] = ctx.seed;
  s["parameters"] = std::move(parameters);
  s["metrics"] = std::move(metrics);
  s["files"] = m.files();
  write_json(m.dir() / "summary.json", s);
}

void write_trace_csv(const fs::path& path, const TraceResult& tr) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write '" + path.string() + "'");
  f << "x_s,p0_mean,p0_stderr\n";
  char line[96];
  for (std::size_t i = 0; i < tr.x.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", tr.x[i], tr.p0_mean[i], tr.p0_stderr[i]);
    f << line;
  }
  if (!f) throw DataError("failed writing '" + path.string() + "'");
}

json to_json(const AmplifierParams& p) { return {{"g0", p.g0}, {"e_sat_j", p.e_sat}}; }

json to_json(const PreshapeParams& p) {
  return {{"p_start", p.p_start}, {"t_knee_s", p.t_knee}, {"p_knee", p.p_knee}, {"tau_exp_s", p.tau_exp}, {"p_end", p.p_end}};
}

json to_json(const Interval& i) { return {{"start_s", i.start}, {"width_s", i.width}, {"end_s", i.end()}}; }

json to_json(const DampedFit& f) {
  auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"envelope", std::string(to_string(f.envelope))},
          {"frequency_rad_s", f.frequency},
          {"frequency_hz", f.frequency / constants::two_pi},
          {"frequency_stderr_rad_s", finite_or_null(f.frequency_stderr)},
          {"decay_1e_s", finite_or_null(f.decay_1e)},
          {"decay_stderr_s", finite_or_null(f.decay_stderr)},
          {"contrast", f.contrast},
          {"contrast_stderr", finite_or_null(f.contrast_stderr)},
          {"offset", f.offset},
          {"amplitude", f.amplitude},
          {"phase_rad", f.phase},
          {"residual_rms", f.residual_rms},
          {"points", f.points},
          {"undersampled", f.undersampled}};
}

template <typename Section>
const Section& need(const std::optional<Section>& s, const char* name, const char* command) {
  if (!s) throw ConfigError(std::string(command) + " needs a '" + name + "' section");
  return *s;
}

TimeGrid default_grid(double width) {
  const double dt = width / 1000.0;
  return TimeGrid(-0.2 * width, dt, 1401);
}

Waveform square(const TimeGrid& grid, double width, double level) {
  std::vector<double> s(grid.size(), 0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid.time(k);
    if (t >= 0.0 && t < width) s[k] = level;
  }
  return Waveform(grid, std::move(s));
}

// Gain seen by the first and last nonzero input samples.
std::pair<double, double> edge_gains(const Waveform& in, const Waveform& out) {
  const auto& a = in.samples();
  const auto first = std::find_if(a.begin(), a.end(), [](double v) { return v > 0.0; });
  if (first == a.end()) return {1.0, 1.0};
  const auto last = std::find_if(a.rbegin(), a.rend(), [](double v) { return v > 0.0; });
  const auto i = static_cast<std::size_t>(first - a.begin());
  const auto j = static_cast<std::size_t>(a.rend() - last) - 1;
  return {out.samples()[i] / a[i], out.samples()[j] / a[j]};
}

fs::path input_path(const Context& ctx, const std::optional<fs::path>& from_config, const char* command) {
  if (ctx.input) return *ctx.input;
  if (from_config) return *from_config;
  throw ConfigError(std::string(command) + " needs an input CSV (io.input_csv or --input)");
}

int emit_dynamics(const Context& ctx, const std::string& command, const TraceResult& tr, EnvelopeKind primary,
                  json parameters, Manifest& m) {
  write_trace_csv(m.add("trace.csv"), tr);
  const EnvelopeKind other = primary == EnvelopeKind::exponential ? EnvelopeKind::gaussian : EnvelopeKind::exponential;
  DampedFit fit;
  try {
    fit = fit_damped_sinusoid(tr, primary);
  } catch (const FitDegenerateError& e) {
    write_summary(ctx, m, command, std::move(parameters), {{"fit_error", e.what()}});
    throw;
  }
  json fit_doc = to_json(fit);
  try {
    fit_doc["alternate"] = to_json(fit_damped_sinusoid(tr, other));
  } catch (const FitDegenerateError&) {
    fit_doc["alternate"] = nullptr;
  }
  write_json(m.add("fit.json"), fit_doc);
  json metrics{{"frequency_hz", fit.frequency / constants::two_pi},
               {"decay_1e_s", std::isfinite(fit.decay_1e) ? json(fit.decay_1e) : json(nullptr)},
               {"contrast", fit.contrast},
               {"envelope", std::string(to_string(fit.envelope))},
               {"residual_rms", fit.residual_rms}};
  write_summary(ctx, m, command, std::move(parameters), std::move(metrics));
  return kExitOk;
}

json dynamics_parameters(const DynamicsSection& d, const ExcitationConfig& exc) {
  return {{"rabi_hz", effective_rabi(exc.p420, exc.p1013, exc) / constants::two_pi},
          {"p420_w", exc.p420},
          {"p1013_w", exc.p1013},
          {"shots", d.shots},
          {"temperature_k", d.temperature_k},
          {"doppler_sigma_rad_s", doppler_sigma(d.temperature_k, constants::k_eff_counter_propagating, constants::rb87_mass)},
          {"scan_points", d.scan_points}};
}

}  // namespace

int cmd_amplify(const Context& ctx) {
  const AmplifierParams amp = need(ctx.cfg.amplifier, "amplifier", "amplify").params();
  const fs::path in_path = input_path(ctx, ctx.cfg.io.input_csv, "amplify");
  if (ctx.dry_run) return print_plan(ctx, {"output.csv"});

  const Waveform in = read_csv(in_path);
  if (!in.is_nonnegative()) throw DataError("input '" + in_path.string() + "' has negative power samples");
  const Waveform out = forward_amplify(in, amp);
  Manifest m(ctx.out_dir);
  write_csv(m.add("output.csv"), out);

  const auto [lead, trail] = edge_gains(in, out);
  const double e_in = total_energy(in);
  json metrics{{"input_energy_j", e_in},
               {"output_energy_j", total_energy(out)},
               {"output_energy_closed_form_j", output_energy(e_in, amp)},
               {"peak_output_w", out.max()},
               {"leading_gain", lead},
               {"trailing_gain", trail},
               {"leading_trailing_ratio", lead / trail}};
  write_summary(ctx, m, "amplify", {{"amplifier", to_json(amp)}}, std::move(metrics));
  return kExitOk;
}

int cmd_preshape(const Context& ctx) {
  const AmplifierParams amp = need(ctx.cfg.amplifier, "amplifier", "preshape").params();
  const PlantSection& plant_cfg = need(ctx.cfg.plant, "plant", "preshape");
  const PreshapeSection& ps = need(ctx.cfg.preshape, "preshape", "preshape");
  const std::optional<fs::path> target_path = ctx.input ? ctx.input : ctx.cfg.io.target_csv;
  if (!target_path && !(ps.target_level_w > 0.0))
    throw ConfigError("preshape needs io.target_csv or a positive preshape.target_level_w");
  if (ctx.dry_run) {
    std::vector<std::string> plan{"target.csv", "analytic_inverse.csv", "preshaped.csv", "achieved.csv", "loop_report.json"};
    if (ps.dump_iterations) plan.emplace_back("iterations/iter_NNNN.csv");
    return print_plan(ctx, plan);
  }

  const Waveform target = target_path ? read_csv(*target_path)
                                      : square(ctx.cfg.io.grid ? ctx.cfg.io.grid->grid() : default_grid(ps.pulse_width_s),
                                               ps.pulse_width_s, ps.target_level_w);
  if (!target.is_nonnegative()) throw DataError("target waveform has negative power samples");
  const WindowSpec win = ps.window();

  Manifest m(ctx.out_dir);
  write_csv(m.add("target.csv"), target);
  const Waveform inverse = inverse_preshape(target, amp);
  write_csv(m.add("analytic_inverse.csv"), inverse);

  PlantConfig plant;
  plant.amp = amp;
  plant.transfer = plant_cfg.transfer;
  plant.seed_peak_w = plant_cfg.seed_peak_w.value_or(1.3 * inverse.max());
  plant.noise_rel_std = plant_cfg.noise_rel_std;
  plant.seed = ctx.seed;
  plant.validate();

  const PreshapeParams init = project_preshape(inverse.scaled(1.0 / plant.seed_peak_w), ps.pulse_width_s);

  LoopSettings settings;
  settings.width = ps.pulse_width_s;
  // A zero tolerance means "spend the whole budget".
  settings.tolerance = ps.tolerance > 0.0 ? ps.tolerance : std::numeric_limits<double>::denorm_min();
  settings.max_iterations = ps.max_iterations;
  if (ps.dump_iterations) {
    settings.on_iteration = [&m](const LoopRecord& rec, const Waveform& drive) {
      char name[48];
      std::snprintf(name, sizeof name, "iterations/iter_%04zu.csv", rec.iteration);
      write_csv(m.add(name), drive);
    };
  }
  const auto [best, report] = closed_loop_preshape(target, make_simulated_plant(plant), init, win, settings);
  const bool reached = ps.tolerance > 0.0 ? report.reached_tolerance : report.best_rms <= 0.0;

  const Waveform drive = eval_preshape(best, target.grid(), ps.pulse_width_s);
  write_csv(m.add("preshaped.csv"), drive);
  PlantConfig quiet = plant;
  quiet.noise_rel_std = 0.0;
  const PlantOutput achieved = simulate_plant(drive, quiet);
  write_csv(m.add("achieved.csv"), achieved.output);
  const double achieved_rms = rms_deviation(achieved.output, target, win, true);

  json records = json::array();
  for (const auto& r : report.records)
    records.push_back({{"iteration", r.iteration}, {"rms", r.rms}, {"evaluations", r.evaluations}, {"params", to_json(r.params)}});
  write_json(m.add("loop_report.json"), {{"initial_params", to_json(init)},
                                         {"initial_rms", report.initial_rms},
                                         {"best_params", to_json(report.best_params)},
                                         {"best_rms", report.best_rms},
                                         {"tolerance", ps.tolerance},
                                         {"reached_tolerance", reached},
                                         {"evaluations", report.evaluations},
                                         {"records", std::move(records)}});

  json parameters{{"amplifier", to_json(amp)},
                  {"transfer", plant_cfg.transfer_name},
                  {"seed_peak_w", plant.seed_peak_w},
                  {"noise_rel_std", plant.noise_rel_std},
                  {"window_s", {win.start(), win.end()}},
                  {"pulse_width_s", ps.pulse_width_s},
                  {"best_params", to_json(best)}};
  json metrics{{"initial_rms", report.initial_rms},
               {"best_rms", report.best_rms},
               {"achieved_rms_noiseless", achieved_rms},
               {"iterations", report.records.back().iteration},
               {"evaluations", report.evaluations},
               {"reached_tolerance", reached},
               {"drive_clipped", achieved.clipped}};
  write_summary(ctx, m, "preshape", std::move(parameters), std::move(metrics));
  if (!reached) {
    *ctx.err << "preshape: tolerance " << ps.tolerance << " not reached; best windowed RMS " << report.best_rms << "\n";
    return kExitTolerance;
  }
  return kExitOk;
}

int cmd_rabi(const Context& ctx) {
  const DynamicsSection& d = need(ctx.cfg.dynamics, "dynamics", "rabi");
  if (ctx.dry_run) return print_plan(ctx, {"trace.csv", "fit.json"});
  const ExcitationConfig exc = d.excitation();
  const std::vector<double> x = d.scan();
  const TraceResult tr = monte_carlo_rabi(x, exc, d.noise(ctx.seed), {ctx.threads});
  Manifest m(ctx.out_dir);
  return emit_dynamics(ctx, "rabi", tr, d.envelope.value_or(EnvelopeKind::exponential), dynamics_parameters(d, exc), m);
}

int cmd_ramsey(const Context& ctx) {
  const DynamicsSection& d = need(ctx.cfg.dynamics, "dynamics", "ramsey");
  if (ctx.dry_run) return print_plan(ctx, {"trace.csv", "fit.json"});
  const ExcitationConfig exc = d.excitation();
  const std::vector<double> x = d.scan();
  const TraceResult tr = monte_carlo_ramsey(x, exc, d.noise(ctx.seed), d.ramsey(), {ctx.threads});
  json parameters = dynamics_parameters(d, exc);
  const double sigma = parameters["doppler_sigma_rad_s"].get<double>();
  parameters["predicted_dephasing_s"] = sigma > 0.0 ? json(std::sqrt(2.0) / sigma) : json(nullptr);
  parameters["ramsey_offset_hz"] = d.ramsey_offset_hz;
  parameters["instantaneous_pulses"] = d.instantaneous_pulses;
  Manifest m(ctx.out_dir);
  return emit_dynamics(ctx, "ramsey", tr, d.envelope.value_or(EnvelopeKind::gaussian), std::move(parameters), m);
}

int cmd_sequence(const Context& ctx) {
  const SequenceSection& s = need(ctx.cfg.sequence, "sequence", "sequence");
  if (ctx.dry_run) return print_plan(ctx, {"plan.json"});
  const std::vector<Interval> burst = generate_burst(s.burst());
  const Interval ir = select_single_pulse(burst, s.ttl());
  const SequencePlan plan =
      center_blue_pulse(ir, WindowSpec(ir.start + s.flat_start_s, ir.start + s.flat_end_s), s.blue_width_s);
  if (plan.degenerate_blue) *ctx.err << "sequence: warning: zero-width blue pulse\n";

  json pulses = json::array();
  for (const auto& p : burst) pulses.push_back(to_json(p));
  const auto selected = static_cast<std::size_t>(std::find(burst.begin(), burst.end(), ir) - burst.begin());
  Manifest m(ctx.out_dir);
  write_json(m.add("plan.json"), {{"burst", std::move(pulses)},
                                  {"selected_index", selected},
                                  {"ir_pulse", to_json(plan.ir_pulse)},
                                  {"blue_pulse", to_json(plan.blue_pulse)},
                                  {"overlap", to_json(plan.overlap)},
                                  {"flat_window_s", {plan.flat_window.start(), plan.flat_window.end()}},
                                  {"margin_before_s", plan.margin_before},
                                  {"margin_after_s", plan.margin_after},
                                  {"degenerate_blue", plan.degenerate_blue}});
  write_summary(ctx, m, "sequence", {{"rep_rate_hz", s.rep_rate_hz}, {"n_pulses", s.n_pulses}},
                {{"selected_index", selected}, {"margin_s", plan.margin_before}, {"degenerate_blue", plan.degenerate_blue}});
  return kExitOk;
}

int cmd_square(const SquareOptions& o, std::ostream& out) {
  if (!(o.width_s > 0.0) || !(o.dt_s > 0.0) || !(o.level_w >= 0.0)) throw ParameterError("square: width, dt must be positive and level nonnegative");
  const double t0 = o.t0_s.value_or(-0.2 * o.width_s);
  const std::size_t n = o.n.value_or(static_cast<std::size_t>(std::llround((1.2 * o.width_s - t0) / o.dt_s)) + 1);
  const TimeGrid grid(t0, o.dt_s, n);
  if (!o.out.parent_path().empty()) fs::create_directories(o.out.parent_path());
  write_csv(o.out, square(grid, o.width_s, o.level_w));
  out << o.out.string() << "\n";
  return kExitOk;
}

}  // namespace pulseforge::cli
