#include <iostream>

#include "hyper/cli.hpp"

int main(int argc, char** argv) {
  return hyper::RunCli(argc, argv, std::cout, std::cerr);
}
