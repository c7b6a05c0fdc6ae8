#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  return othpo::cli::run(argc, argv, std::cout, std::cerr);
}
