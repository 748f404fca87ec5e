#include <iostream>

#include "pairsynth/cli.hpp"

int main(int argc, char** argv) {
  return pairsynth::run_cli(argc, argv, std::cout, std::cerr);
}
