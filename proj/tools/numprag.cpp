#include <iostream>

#include "numprag/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return numprag::run_cli(args, std::cout, std::cerr);
}
