#include <iostream>
#include <string>
#include <vector>

#include "digitstat/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return digitstat::cli::run_cli(args, std::cout, std::cerr, std::cin);
}
