#include <iostream>

#include "lrru/cli.hpp"

int main(int argc, char** argv) {
  return lrru::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
