#pragma once

#include <functional>
#include <string>
#include <vector>

namespace alefem::cli {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

const std::vector<std::string>& suite_names();

/// Runs one suite ("all" runs every suite) and reports each check as it finishes.
std::vector<Check> run_suite(const std::string& suite, const std::function<void(const Check&)>& report);

}  // namespace alefem::cli
