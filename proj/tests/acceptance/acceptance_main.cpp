#include <iostream>

#include "acceptance.hpp"

int main() {
  int failed = 0;
  pxharm::cli::run_acceptance([&](const pxharm::cli::CriterionResult& r) {
    std::cout << pxharm::cli::format_line(r) << std::endl;
    if (!r.passed) ++failed;
  });
  std::cout << (failed == 0 ? "all acceptance criteria passed" : "acceptance criteria failed: " + std::to_string(failed))
            << std::endl;
  return failed == 0 ? 0 : 1;
}
