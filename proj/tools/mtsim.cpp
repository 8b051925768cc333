#include <iostream>
#include <string>
#include <vector>

#include "mtsim/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mtsim::cli::parse_and_dispatch(args, std::cout, std::cerr);
}
