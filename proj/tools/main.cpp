#include <iostream>
#include <string>
#include <vector>

#include "bench_cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return sfc::cli::run_cli(args, std::cout, std::cerr);
}
