#include <iostream>

#include "spcdt/cli.hpp"

int main(int argc, char** argv) {
  return spcdt::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
