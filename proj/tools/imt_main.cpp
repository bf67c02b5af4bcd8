#include <iostream>
#include <string>
#include <vector>

#include "imt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return imt::run_cli(args, std::cout, std::cerr);
}
