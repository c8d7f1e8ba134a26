#include <string>
#include <vector>

#include "simulmt/harness.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return simulmt::run_cli(args);
}
