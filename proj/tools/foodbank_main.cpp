#include <iostream>
#include <string>
#include <vector>

#include "foodbank/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return foodbank::cli::run(args, std::cout, std::cerr);
}
