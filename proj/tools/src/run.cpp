#include <cstdlib>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "pulseforge/cli/cli.hpp"

namespace pulseforge::cli {

namespace {

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParameterError*>(&e) ||
      dynamic_cast<const WindowError*>(&e) || dynamic_cast<const TimingError*>(&e) ||
      dynamic_cast<const SelectionError*>(&e) || dynamic_cast<const nlohmann::json::exception*>(&e))
    return kExitConfig;
  if (dynamic_cast<const FitDegenerateError*>(&e)) return kExitFit;
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const ParseError*>(&e) || dynamic_cast<const GridError*>(&e) ||
      dynamic_cast<const InputError*>(&e) || dynamic_cast<const InversionError*>(&e) ||
      dynamic_cast<const PlantError*>(&e) || dynamic_cast<const std::filesystem::filesystem_error*>(&e))
    return kExitData;
  return kExitFailure;
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pulsed amplifier pre-shaping and Rydberg excitation toolkit", "pulseforge"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool dry_run = false;
  std::string input;

  auto add_common = [&](CLI::App* sub, bool takes_input) {
    sub->add_option("--config", config_path, "Scenario JSON")->required();
    sub->add_option("--out-dir", out_dir, "Output directory (default $PULSEFORGE_OUT_DIR, else ./out)");
    sub->add_option("--seed", seed, "Overrides io.seed");
    sub->add_option("--threads", threads, "Monte-Carlo worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--dry-run", dry_run, "Validate the config and list planned outputs");
    if (takes_input) sub->add_option("--input", input, "Input CSV, overrides the path in the config");
  };
  CLI::App* amplify = app.add_subcommand("amplify", "Forward-amplify an input power trace");
  add_common(amplify, true);
  CLI::App* preshape = app.add_subcommand("preshape", "Analytic inverse and closed-loop pre-shaping of a target");
  add_common(preshape, true);
  CLI::App* rabi = app.add_subcommand("rabi", "Monte-Carlo Rabi trace and damped-sinusoid fit");
  add_common(rabi, false);
  CLI::App* ramsey = app.add_subcommand("ramsey", "Monte-Carlo Ramsey trace and damped-sinusoid fit");
  add_common(ramsey, false);
  CLI::App* sequence = app.add_subcommand("sequence", "Burst, TTL selection and blue-pulse placement");
  add_common(sequence, false);

  SquareOptions sq;
  std::string square_out;
  CLI::App* square = app.add_subcommand("square", "Write a square target pulse CSV");
  square->add_option("--width-s", sq.width_s, "Pulse width")->required();
  square->add_option("--level-w", sq.level_w, "Power level")->required();
  square->add_option("--dt-s", sq.dt_s, "Sample spacing");
  square->add_option("--t0-s", sq.t0_s, "Grid start (default -0.2 width)");
  square->add_option("--samples", sq.n, "Sample count (default: through 1.2 width)");
  square->add_option("--out", square_out, "Output CSV")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "pulseforge: " << one_line(e.what()) << "\n";
    return kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "square") {
      sq.out = square_out;
      return cmd_square(sq, out);
    }
    Context ctx;
    auto [cfg, bytes] = load_config(config_path);
    ctx.cfg = std::move(cfg);
    ctx.config_sha256 = sha256_hex(bytes);
    ctx.seed = seed.value_or(ctx.cfg.io.seed);
    ctx.threads = threads;
    if (!out_dir.empty()) {
      ctx.out_dir = out_dir;
    } else if (const char* env = std::getenv("PULSEFORGE_OUT_DIR"); env && *env) {
      ctx.out_dir = env;
    } else {
      ctx.out_dir = "out";
    }
    ctx.dry_run = dry_run;
    if (!input.empty()) ctx.input = input;
    ctx.out = &out;
    ctx.err = &err;

    if (command == "amplify") return cmd_amplify(ctx);
    if (command == "preshape") return cmd_preshape(ctx);
    if (command == "rabi") return cmd_rabi(ctx);
    if (command == "ramsey") return cmd_ramsey(ctx);
    return cmd_sequence(ctx);
  } catch (const std::exception& e) {
    err << "pulseforge " << command << ": " << one_line(e.what()) << "\n";
    return exit_code_for(e);
  }
}

}  // namespace pulseforge::cli
