#include "qdc/cli.hpp"

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  qdc::cli::RunResult result = qdc::cli::run(args);
  std::cout << result.report;
  return result.exit_code;
}
