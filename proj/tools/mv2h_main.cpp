#include <iostream>
#include <string>
#include <vector>

#include "mv2h/runner.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mv2h::runCommandLine(args, std::cout, std::cerr);
}
