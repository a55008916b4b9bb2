#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pulseforge::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitTolerance = 4,
  kExitFit = 5,
};

// Entry point shared by the executable and the tests. args excludes argv[0].
// Diagnostics go to err as a single line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

}  // namespace pulseforge::cli
