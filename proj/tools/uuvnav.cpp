#include <iostream>
#include <string>
#include <vector>

#include "uuvnav/cli.hpp"

int main(int argc, char** argv) {
  return uuvnav::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
