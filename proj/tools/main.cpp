#include "jau/cli.hpp"

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return jau::run_cli(args, std::cout, std::cerr);
}
