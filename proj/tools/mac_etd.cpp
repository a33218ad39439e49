#include <iostream>
#include <string>
#include <vector>

#include "mac/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return mac::cli_main(args, std::cout, std::cerr);
}
