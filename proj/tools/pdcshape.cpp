#include <iostream>

#include "pdcshape/cli_io.hpp"

int main(int argc, char** argv) {
  return pdcshape::cli::main_entry(argc, argv, std::cout, std::cerr);
}
