#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace pxharm::cli {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double limit_seconds = 0.0;  ///< 0: no runtime limit
};

/// Runs the acceptance matrix in order; `on_result` sees each result as soon
/// as it is available. `only` restricts to the listed criterion ids.
std::vector<CriterionResult> run_acceptance(const std::function<void(const CriterionResult&)>& on_result = {},
                                            const std::vector<int>& only = {});

/// "PASS  3  constant-p radial oracle: ... [0.31 s]".
std::string format_line(const CriterionResult& r);

nlohmann::ordered_json to_json(const std::vector<CriterionResult>& results);

}  // namespace pxharm::cli
