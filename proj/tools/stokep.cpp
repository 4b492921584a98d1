#include <iostream>

#include "stokep/cli/commands.hpp"

int main(int argc, char** argv) {
  return stokep::cli::run_cli(argc, argv, {std::cout, std::cerr});
}
