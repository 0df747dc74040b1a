#include <iostream>

#include "psys/harness/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return psys::harness::run_command(args, std::cout, std::cerr);
}
