#include <iostream>

#include "copula_exo/cli/run.hpp"

int main(int argc, char** argv) {
  return copula_exo::cli::main_entry(argc, argv, std::cout, std::cerr);
}
