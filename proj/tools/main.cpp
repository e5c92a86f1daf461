#include <iostream>
#include <string>
#include <vector>

#include "tmeval/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tmeval::cli::run(args, std::cout, std::cerr);
}
