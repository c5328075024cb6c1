#include <iostream>
#include <string>
#include <vector>

#include "seqreg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return seqreg::cli_dispatch(args, std::cout, std::cerr);
}
