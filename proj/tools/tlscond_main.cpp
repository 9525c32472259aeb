#include <iostream>
#include <string>
#include <vector>

#include "tlscond/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return tlscond::run_cli(args, std::cout, std::cerr);
}
