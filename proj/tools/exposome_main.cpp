#include <iostream>
#include <string>
#include <vector>

#include "exposome/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  std::vector<std::string> args(argv, argv + argc);
  return exposome::cli::run_cli(std::move(args), std::cout, std::cerr);
}
