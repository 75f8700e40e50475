#include <iostream>

#include "imreg/cli.hpp"

int main(int argc, char** argv) {
  return imreg::cli::run(argc, argv, std::cout, std::cerr);
}
