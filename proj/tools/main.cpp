#include "ergm_varest/cli.hpp"

#include <iostream>

int main(int argc, char **argv) {
  return ergm::cli::dispatch({argv + 1, argv + argc}, std::cout, std::cerr);
}
