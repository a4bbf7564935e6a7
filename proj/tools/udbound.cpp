#include <iostream>

#include "udbound/cli.hpp"

int main(int argc, char** argv) {
  return udbound::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
