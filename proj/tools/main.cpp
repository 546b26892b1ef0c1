#include <string>
#include <vector>

#include "nullag/cli.hpp"

int main(int argc, char** argv) {
  return nullag::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
