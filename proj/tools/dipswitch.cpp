#include <iostream>
#include <string>
#include <vector>

#include "dipswitch/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dipswitch::cli::main_entry(args, std::cout, std::cerr);
}
