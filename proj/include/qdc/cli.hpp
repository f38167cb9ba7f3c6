#pragma once

#include <string>
#include <vector>

namespace qdc::cli {

struct RunResult {
  int exit_code = 0;       // 0 positive verdict, 1 negative verdict, 2 input error
  std::string report;      // canonical JSON document
};

/// Executes one CLI invocation (arguments without the program name).
/// Identical arguments and input files produce byte-identical reports.
RunResult run(const std::vector<std::string>& args);

}  // namespace qdc::cli
