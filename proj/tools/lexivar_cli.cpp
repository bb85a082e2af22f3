#include <iostream>

#include "lexivar/cli.hpp"

int main(int argc, char** argv) {
  return lexivar::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
