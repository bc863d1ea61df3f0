#include <iostream>

#include "largenoise/cli.hpp"

int main(int argc, char** argv) {
  return largenoise::cli::run(argc, argv, std::cout, std::cerr);
}
