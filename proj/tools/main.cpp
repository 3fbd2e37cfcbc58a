#include <iostream>

#include "nnlscs/cli.hpp"

int main(int argc, char** argv) {
  return nnlscs::cli::dispatch(argc, argv, std::cout, std::cerr);
}
