#include <iostream>

#include "bias_audit/cli.hpp"

int main(int argc, char** argv) {
  return bias_audit::cli::run(argc, argv, std::cout, std::cerr);
}
