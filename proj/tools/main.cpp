#include <iostream>
#include <string>
#include <vector>

#include "cavity_anneal/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return cavity_anneal::cli::run(args, std::cout, std::cerr);
}
