#include <string>
#include <vector>

#include "adagmrf/commands.hpp"

int main(int argc, char** argv) {
  return adagmrf::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
