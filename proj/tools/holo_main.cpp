#include <iostream>

#include "holo/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return holo::run_cli(args, std::cout, std::cerr);
}
