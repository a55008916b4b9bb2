#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pulseforge/cli/config.hpp"

namespace pulseforge::cli {

struct Context {
  ScenarioConfig cfg;
  std::string config_sha256;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::filesystem::path out_dir;
  bool dry_run = false;
  std::optional<std::filesystem::path> input;  // --input override for amplify / preshape
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

struct SquareOptions {
  double width_s = 1e-6;
  double level_w = 1.0;
  double dt_s = 1e-9;
  std::optional<double> t0_s;
  std::optional<std::size_t> n;
  std::filesystem::path out;
};

int cmd_amplify(const Context& ctx);
int cmd_preshape(const Context& ctx);
int cmd_rabi(const Context& ctx);
int cmd_ramsey(const Context& ctx);
int cmd_sequence(const Context& ctx);
int cmd_square(const SquareOptions& opts, std::ostream& out);

}  // namespace pulseforge::cli
