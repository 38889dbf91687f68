#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "acceptance.hpp"
#include "pipeline.hpp"
#include "svg.hpp"

namespace {

using pxharm::cli::Json;

int load_and_run(const std::string& path, const std::string& out) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "config error: cannot open " << path << '\n';
    return 2;
  }
  Json config;
  try {
    config = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  std::string dir = out;
  if (dir.empty()) dir = config.value("output", std::string("out"));
  return pxharm::cli::run_with_exit_code(config, dir, std::cerr);
}

/// Runs a synthesized single-check config and prints the record's values.
int run_single(const Json& config, const std::string& out) {
  try {
    const auto r = pxharm::cli::run_config(config, out);
    std::cout << r.report["records"][0].dump(2) << '\n';
    for (const auto& f : r.failures) std::cerr << "assertion failed: " << f << '\n';
    return r.passed() ? 0 : 1;
  } catch (const pxharm::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const pxharm::PreconditionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pxharm: p(x)-harmonic toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  auto* run = app.add_subcommand("run", "run a JSON config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--out,-o", out_dir, "output directory (default: config 'output' or ./out)");

  std::string domain, exponent, data, method = "damped-newton", solve_out = "out";
  double h = 0.0;
  auto* solve = app.add_subcommand("solve", "solve one Dirichlet problem and write the field");
  solve->set_help_flag("--help", "print this help message and exit");
  solve->add_option("--domain", domain)->required();
  solve->add_option("--p", exponent)->required();
  solve->add_option("--data", data)->required();
  solve->add_option("--h", h)->required();
  solve->add_option("--method", method);
  solve->add_option("--out,-o", solve_out);

  std::string family = "wolanski-super", bexp, box;
  double M = 1.0, r = 0.0, mu = 0.0;
  int samples = 10000, n = 2;
  bool force = false;
  std::vector<double> center{0.0, 0.0};
  auto* barrier = app.add_subcommand("barrier-check", "certify a barrier and print the record");
  barrier->add_option("--family", family);
  barrier->add_option("--p", bexp)->required();
  barrier->add_option("--M", M);
  barrier->add_option("--r", r)->required();
  barrier->add_option("--mu", mu);
  barrier->add_option("--samples", samples);
  barrier->add_option("--n", n);
  barrier->add_option("--center", center)->expected(2)->delimiter(',');
  barrier->add_option("--box", box, "exponent bounds box x0,y0,x1,y1 (default: center +- 1)");
  barrier->add_flag("--force", force);

  std::string suite, json_out;
  std::vector<int> only;
  auto* verify = app.add_subcommand("verify", "run a built-in suite");
  verify->add_option("--suite", suite)->required();
  verify->add_option("--only", only, "criterion ids")->delimiter(',');
  verify->add_option("--json", json_out, "write results as JSON");

  std::string csv_path, svg_path;
  auto* plot = app.add_subcommand("plot", "render a field or profile CSV as SVG");
  plot->add_option("csv", csv_path)->required();
  plot->add_option("-o,--out", svg_path, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run) return load_and_run(config_path, out_dir);

  if (*solve) {
    Json config = {{"domain", domain},
                   {"exponent", exponent},
                   {"data", data},
                   {"h", h},
                   {"solver", {{"method", method}}},
                   {"checks", Json::array({{{"check", "solve"}}})}};
    return run_single(config, solve_out);
  }

  if (*barrier) {
    std::string spec = bexp;
    if (spec.find('@') == std::string::npos) {
      if (box.empty()) {
        std::ostringstream b;
        b.precision(17);
        b << center[0] - 1.0 << ',' << center[1] - 1.0 << ',' << center[0] + 1.0 << ',' << center[1] + 1.0;
        box = b.str();
      }
      spec += "@" + box;
    }
    Json check = {{"check", "barrier"}, {"family", family}, {"M", M},          {"r", r},
                  {"samples", samples}, {"n", n},           {"force", force}, {"center", center}};
    if (mu > 0.0) check["mu"] = mu;
    Json config = {{"exponent", spec}, {"checks", Json::array({check})}};
    return run_single(config, "");
  }

  if (*verify) {
    if (suite != "acceptance") {
      std::cerr << "config error: unknown suite '" << suite << "'\n";
      return 2;
    }
    const auto results = pxharm::cli::run_acceptance(
        [](const pxharm::cli::CriterionResult& c) { std::cout << pxharm::cli::format_line(c) << std::endl; }, only);
    bool ok = true;
    for (const auto& c : results) ok = ok && c.passed;
    if (!json_out.empty()) std::ofstream(json_out) << pxharm::cli::to_json(results).dump(2) << '\n';
    return ok ? 0 : 1;
  }

  if (*plot) {
    std::ifstream in(csv_path);
    if (!in) {
      std::cerr << "error: cannot open " << csv_path << '\n';
      return 2;
    }
    std::string svg;
    try {
      svg = pxharm::cli::plot_csv(in);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
    if (svg_path.empty()) {
      std::cout << svg;
    } else {
      std::ofstream(svg_path) << svg;
    }
    return 0;
  }
  return 2;
}
