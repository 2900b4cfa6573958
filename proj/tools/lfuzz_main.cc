#include <iostream>
#include <string>
#include <vector>

#include "lfuzz/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lfuzz::CliMain(args, std::cout, std::cerr);
}
