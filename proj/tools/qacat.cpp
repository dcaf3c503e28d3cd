#include <string>
#include <vector>

#include "qacat/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qacat::cli::run(args);
}
