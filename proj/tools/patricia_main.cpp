#include <iostream>
#include <string>
#include <vector>

#include "patricia/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return patricia::run_cli(args, std::cout, std::cerr, std::cin);
}
