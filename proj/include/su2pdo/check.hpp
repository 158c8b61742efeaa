#pragma once

#include <string>
#include <vector>

namespace su2pdo::check {

struct CheckResult {
  std::string name;
  bool pass;
  double max_err;
};

// Suite names accepted by run_suite, in execution order of "all".
const std::vector<std::string>& suite_names();

// Runs one named suite, or every suite for "all". Unknown names throw
// std::invalid_argument; numerical machinery may throw NumericalError.
std::vector<CheckResult> run_suite(const std::string& name);

}  // namespace su2pdo::check
