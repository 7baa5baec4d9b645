#include <string>
#include <vector>

#include "geomgate/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return geomgate::cli::run_command(args);
}
