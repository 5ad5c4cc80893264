#include <iostream>

#include "crisis/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return crisis::cli::run(args, std::cout, std::cerr);
}
