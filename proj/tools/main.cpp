#include <string>
#include <vector>

#include "curveflow/cli.hpp"

int main(int argc, char** argv) {
  return curveflow::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
