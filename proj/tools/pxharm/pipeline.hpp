#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pxharm/barriers.hpp"
#include "pxharm/exponent.hpp"
#include "pxharm/geometry.hpp"
#include "pxharm/solver.hpp"

namespace pxharm::cli {

using Json = nlohmann::ordered_json;

/// Bad or inconsistent run configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Named analytic boundary-data families: "x1", "x2", "linear:a1,a2[,c]",
/// "harmonic:x1x2", "harmonic:x1^2-x2^2", "radial:q", "positive-x2",
/// "vanishing-arc:c", "vanishing-arc-weighted:c", "constant:c", "scaled:k:<spec>".
BoundaryData parse_data(const std::string& spec);

/// Accepts "disk:1" or {"kind": "disk", "R": 1.0} style objects.
Domain domain_from_json(const Json& j);
/// Accepts "affine:2:0.5,0", "affine:2:0.5,0@-1,-1,1,1" (box suffix) or
/// {"kind": ..., "params": [...], "box": [x0, y0, x1, y1]}.
ExponentField exponent_from_json(const Json& j);

SolveMethod parse_method(const std::string& name);

Json to_json(const SolveReport& r);
Json to_json(const CertificationReport& r);
Json to_json(const HypothesisStatus& h);
Json to_json(const Vec2& v);

/// Worker cap from PXHARM_THREADS (default: hardware concurrency, at least 1).
unsigned worker_count();

struct RunResult {
  Json report;                        ///< {"records": [...], "passed": bool}
  std::vector<std::string> failures;  ///< one line per failed hard assertion
  bool passed() const { return failures.empty(); }
};

/// Validates the whole plan (throws ConfigError), solves each distinct
/// (domain, exponent, data, h) tuple once, runs the checks in config order and
/// writes report.json plus CSV/SVG artifacts into `out_dir` when it is non-empty.
RunResult run_config(const Json& config, const std::filesystem::path& out_dir);

/// run_config wrapped with exit codes: 0 all assertions hold, 1 an assertion
/// failed, 2 configuration error. Diagnostics go to `err`.
int run_with_exit_code(const Json& config, const std::filesystem::path& out_dir, std::ostream& err);

}  // namespace pxharm::cli
