#include <iostream>
#include <string>
#include <vector>

#include "pulseforge/cli/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return pulseforge::cli::run(args, std::cout, std::cerr);
}
