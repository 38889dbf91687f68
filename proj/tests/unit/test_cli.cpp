#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "pipeline.hpp"
#include "pxharm/estimates.hpp"
#include "svg.hpp"

using namespace pxharm;
using namespace pxharm::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pxharm_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int exit_code(const Json& config) {
  std::ostringstream err;
  return run_with_exit_code(config, "", err);
}

Json base() {
  return Json::parse(R"({"domain": "slab:2", "exponent": "const:2", "data": "positive-x2", "h": 0.02, "checks": []})");
}

int run_exe(const std::string& args) {
  const int status = std::system((std::string(PXHARM_EXE) + " " + args + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST(Data, NamedFamilies) {
  EXPECT_EQ(parse_data("x1")(Vec2(0.3, 0.7)), 0.3);
  EXPECT_EQ(parse_data("linear:1,2,3")(Vec2(1, 1)), 6.0);
  EXPECT_NEAR(parse_data("radial:2")(Vec2(3, 4)), 25.0, 1e-12);
  EXPECT_EQ(parse_data("positive-x2")(Vec2(0, -1)), 0.0);
  EXPECT_EQ(parse_data("scaled:2:x2")(Vec2(0, 1.5)), 3.0);
  EXPECT_THROW(parse_data("cubic"), ConfigError);
  EXPECT_THROW(parse_data("linear:1"), ConfigError);
}

TEST(Config, DomainAndExponentObjects) {
  EXPECT_EQ(domain_from_json(Json::parse(R"({"kind": "annulus", "R1": 0.25, "R2": 1})")).kind(), Domain::Kind::Annulus);
  const auto p = exponent_from_json(Json::parse(R"({"kind": "affine", "p0": 2.0, "a": [0.5, 0.0], "box": [-1, -1, 1, 1]})"));
  EXPECT_DOUBLE_EQ(p.eval(Vec2(1.0, 0.0)), 2.5);
  EXPECT_DOUBLE_EQ(exponent_from_json("affine:2:0.5,0@-1,-1,1,1").p_minus(), 1.5);
  EXPECT_THROW(exponent_from_json("affine:2:0.5,0"), ConfigError);
  EXPECT_THROW(domain_from_json(Json::parse(R"({"kind": "disk"})")), ConfigError);
}

TEST(Config, ValidationErrorsExitTwo) {
  auto c = base();
  c["checks"] = Json::parse(R"([{"check": "carleson", "w": [0, 0.5], "r": 0.2}])");
  EXPECT_EQ(exit_code(c), 2);  // w not on the boundary
  c["checks"] = Json::parse(R"([{"check": "harnack", "center": [0, 0.3], "r": 0.1}])");
  EXPECT_EQ(exit_code(c), 2);  // B(center, 4r) leaves the slab
  c["checks"] = Json::parse(R"([{"check": "teleport"}])");
  EXPECT_EQ(exit_code(c), 2);
  c["checks"] = Json::parse(R"([{"check": "solve"}])");
  c["data"] = "unknown-family";
  EXPECT_EQ(exit_code(c), 2);
  EXPECT_EQ(exit_code(Json::parse(R"({"checks": 3})")), 2);
}

TEST(Config, PlanIsRejectedBeforeSolving) {
  auto c = base();
  c["h"] = 0.001;  // would be an expensive solve
  c["checks"] = Json::parse(R"([{"check": "solve"}, {"check": "carleson", "w": [0, 1], "r": 0.2}])");
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_EQ(exit_code(c), 2);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1.0);
}

TEST(Run, PassingAndFailingAssertions) {
  auto c = base();
  c["checks"] = Json::parse(R"([{"check": "carleson", "w": [0, 0], "r": 0.2}])");
  EXPECT_EQ(exit_code(c), 0);
  c["exponent"] = "affine:2:0.5,0@-1,-1,1,1";
  c["checks"] = Json::parse(R"([{"check": "barrier", "family": "wolanski-super", "r": 0.1, "mu": 0.5, "force": true}])");
  EXPECT_EQ(exit_code(c), 1);
}

TEST(Run, RecordsCarryMetadataInConfigOrder) {
  auto c = base();
  c["checks"] = Json::parse(R"([
    {"check": "boundary-decay", "w": [0, 0], "r": 0.6},
    {"check": "carleson", "w": [0, 0], "r": 0.2},
    {"check": "harnack", "center": [0, 0.5], "r": 0.1}
  ])");
  const auto r = run_config(c, "");
  ASSERT_EQ(r.report["records"].size(), 3u);
  const char* kinds[] = {"boundary-decay", "carleson", "harnack"};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& rec = r.report["records"][i];
    EXPECT_EQ(rec["check"], kinds[i]);
    EXPECT_EQ(rec["index"], i);
    for (const char* key : {"paper_ref_tag", "hypothesis_status", "h", "window"}) EXPECT_TRUE(rec.contains(key)) << key;
  }
  EXPECT_NEAR(r.report["records"][2]["values"]["c_H"].get<double>(), 1.2, 1e-9);
}

TEST(Run, TwoFieldChecksShareOneGrid) {
  auto c = base();
  c["domain"] = "disk:1";
  c["data"] = "vanishing-arc:0.5";
  c["h"] = 0.02;
  c["checks"] = Json::parse(R"([
    {"check": "comparison", "data": "scaled:2:vanishing-arc:0.5", "data2": "vanishing-arc:0.5"},
    {"check": "boundary-harnack", "w": [0, -1], "r": 0.5, "data2": "vanishing-arc-weighted:0.5"}
  ])");
  std::ostringstream err;
  EXPECT_EQ(run_with_exit_code(c, "", err), 0) << err.str();
}

TEST(Run, ReportIsReproducible) {
  auto c = base();
  c["seed"] = 5;
  c["checks"] = Json::parse(R"([
    {"check": "solve"},
    {"check": "oscillation", "w": [0, 0], "r": 1.0, "levels": 3},
    {"check": "riesz-measure", "w": [0, 0], "r": 0.2, "h": 0.01}
  ])");
  const auto a = scratch("repro_a"), b = scratch("repro_b");
  ASSERT_EQ(run_with_exit_code(c, a, std::cerr), 0);
  ASSERT_EQ(run_with_exit_code(c, b, std::cerr), 0);
  EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
  EXPECT_TRUE(fs::exists(a / "check0_field.csv"));
  EXPECT_TRUE(fs::exists(a / "check1_profile.csv"));
  EXPECT_TRUE(fs::exists(a / "check2_measure.csv"));
}

TEST(Plot, EmptyProfileGivesAxesOnly) {
  std::istringstream in("radius,value\n");
  const std::string svg = plot_csv(in);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_EQ(svg.find("<circle"), std::string::npos);
}

TEST(Plot, MalformedInputThrows) {
  std::istringstream a("foo,bar\n1,2\n");
  EXPECT_THROW(plot_csv(a), std::runtime_error);
  std::istringstream b("radius,value\n0.1,abc\n");
  EXPECT_THROW(plot_csv(b), std::runtime_error);
}

TEST(Plot, ProfileSlopeMatchesFit) {
  std::vector<double> radii{0.5, 0.25, 0.125, 0.0625}, values;
  std::ostringstream csv;
  csv << "radius,value\n";
  for (double r : radii) {
    values.push_back(0.3 * std::pow(r, 0.61) * (1 + 0.01 * r));
    csv.precision(17);
    csv << r << ',' << values.back() << '\n';
  }
  std::istringstream in(csv.str());
  const std::string svg = plot_csv(in);
  std::smatch m;
  ASSERT_TRUE(std::regex_search(svg, m, std::regex("slope = ([-0-9.eE+]+)")));
  EXPECT_NEAR(std::stod(m[1]), fit_decay(radii, values, 1.0, 1.0).exponent, 1e-9);
}

TEST(Plot, LinearFieldHeatmapIsMonotoneAndDeterministic) {
  std::ostringstream csv;
  csv << "x,y,value\n";
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; j <= 4; ++j) csv << i * 0.25 << ',' << j * 0.25 << ',' << i * 0.25 << '\n';
  std::istringstream a(csv.str()), b(csv.str());
  const std::string s1 = plot_csv(a), s2 = plot_csv(b);
  EXPECT_EQ(s1, s2);
  // The colormap runs blue -> white -> red, so red minus blue increases strictly with the value.
  std::regex fill("<rect x=\"([0-9.]+)\"[^>]*fill=\"#([0-9a-f]{2})[0-9a-f]{2}([0-9a-f]{2})\"");
  std::map<double, int> warmth;
  for (auto it = std::sregex_iterator(s1.begin(), s1.end(), fill); it != std::sregex_iterator(); ++it)
    warmth[std::stod((*it)[1])] = std::stoi((*it)[2], nullptr, 16) - std::stoi((*it)[3], nullptr, 16);
  ASSERT_EQ(warmth.size(), 5u);
  int prev = -1000;
  for (const auto& [x, w] : warmth) {
    EXPECT_GT(w, prev) << x;
    prev = w;
  }
}

TEST(Executable, ExitCodes) {
  EXPECT_EQ(run_exe("verify --suite nonexistent"), 2);
  EXPECT_EQ(run_exe("run /nonexistent/config.json"), 2);
  EXPECT_EQ(run_exe("frobnicate"), 2);
  EXPECT_EQ(run_exe("barrier-check --family wolanski-super --p affine:2:0.5,0 --M 1 --r 0.1"), 0);
  EXPECT_EQ(run_exe("barrier-check --family bauman-super --p const:3 --r 0.5"), 2);
  const auto dir = scratch("exe_solve");
  EXPECT_EQ(run_exe("solve --domain disk:1 --p const:2 --data harmonic:x1x2 --h 0.05 --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "check0_field.csv"));
  EXPECT_EQ(run_exe("plot " + (dir / "check0_field.csv").string() + " -o " + (dir / "f.svg").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "f.svg"));
}
