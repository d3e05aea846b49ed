#include <iostream>

#include "anharmonic/cli.hpp"

int main(int argc, char** argv) {
  return anharmonic::cli::run(argc, argv, std::cout, std::cerr);
}
