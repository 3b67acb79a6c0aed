#include <iostream>
#include <string>
#include <vector>

#include "handreq/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return handreq::run_cli(args, std::cout, std::cerr);
}
