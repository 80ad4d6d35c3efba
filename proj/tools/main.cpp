#include <iostream>
#include <string>
#include <vector>

#include "ucake/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return ucake::dispatch(args, std::cout, std::cerr);
}
