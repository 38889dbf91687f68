#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "pxharm/estimates.hpp"
#include "pxharm/grid.hpp"
#include "pxharm/measure.hpp"
#include "svg.hpp"

namespace pxharm::cli {

namespace {

std::vector<double> numbers(const std::string& s) {
  std::vector<double> out;
  std::string tok;
  std::stringstream in(s);
  while (std::getline(in, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + tok + "'");
    }
  }
  return out;
}

}  // namespace

BoundaryData parse_data(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto one = [&](double def) {
    if (arg.empty()) return def;
    const auto v = numbers(arg);
    if (v.size() != 1) throw ConfigError("data '" + spec + "' takes one parameter");
    return v[0];
  };
  if (name == "x1") return [](const Vec2& x) { return x.x(); };
  if (name == "x2") return [](const Vec2& x) { return x.y(); };
  if (name == "positive-x2") return [](const Vec2& x) { return std::max(0.0, x.y()); };
  if (name == "linear") {
    const auto v = numbers(arg);
    if (v.size() < 2 || v.size() > 3) throw ConfigError("linear data takes a1,a2[,c]");
    const double c = v.size() == 3 ? v[2] : 0.0;
    return [a1 = v[0], a2 = v[1], c](const Vec2& x) { return a1 * x.x() + a2 * x.y() + c; };
  }
  if (name == "harmonic") {
    if (arg == "x1x2") return [](const Vec2& x) { return x.x() * x.y(); };
    if (arg == "x1^2-x2^2") return [](const Vec2& x) { return x.x() * x.x() - x.y() * x.y(); };
    throw ConfigError("unknown harmonic data '" + arg + "'");
  }
  if (name == "radial") {
    const double q = one(1.0);
    return [q](const Vec2& x) { return std::pow(x.norm(), q); };
  }
  if (name == "vanishing-arc") {
    const double c = one(0.5);
    return [c](const Vec2& x) { return std::max(0.0, x.y() + c); };
  }
  if (name == "vanishing-arc-weighted") {
    const double c = one(0.5);
    return [c](const Vec2& x) { return std::max(0.0, x.y() + c) * (2.0 + x.x()); };
  }
  if (name == "constant") {
    const double c = one(0.0);
    return [c](const Vec2&) { return c; };
  }
  if (name == "scaled") {
    const auto sep = arg.find(':');
    if (sep == std::string::npos) throw ConfigError("scaled data is scaled:k:<spec>");
    const auto k = numbers(arg.substr(0, sep));
    if (k.size() != 1) throw ConfigError("scaled data is scaled:k:<spec>");
    auto inner = parse_data(arg.substr(sep + 1));
    return [k = k[0], inner](const Vec2& x) { return k * inner(x); };
  }
  throw ConfigError("unknown boundary data '" + spec + "'");
}

Domain domain_from_json(const Json& j) {
  try {
    if (j.is_string()) return parse_domain(j.get<std::string>());
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("domain needs a kind");
    const std::string kind = j["kind"].get<std::string>();
    if (j.contains("params")) return make_domain(kind, j["params"].get<std::vector<double>>());
    auto get = [&](const char* key) -> std::optional<double> {
      if (j.contains(key)) return j[key].get<double>();
      return std::nullopt;
    };
    std::vector<double> params;
    auto push = [&](std::initializer_list<const char*> keys, bool required) {
      for (const char* k : keys) {
        if (auto v = get(k)) {
          params.push_back(*v);
          return;
        }
      }
      if (required) throw ConfigError("domain '" + kind + "' is missing " + *keys.begin());
    };
    if (kind == "disk") {
      push({"R", "radius"}, true);
      if (j.contains("center")) {
        const auto c = j["center"].get<std::vector<double>>();
        if (c.size() != 2) throw ConfigError("center needs two coordinates");
        params.push_back(c[0]);
        params.push_back(c[1]);
      }
    } else if (kind == "annulus") {
      push({"R1", "inner"}, true);
      push({"R2", "outer"}, true);
    } else if (kind == "slab" || kind == "half-plane-slab") {
      push({"height", "H"}, true);
      push({"half_width"}, false);
    } else if (kind == "square") {
      push({"L", "side"}, true);
    } else {
      push({"L", "size"}, true);
      push({"rho_c", "corner_radius"}, false);
    }
    return make_domain(kind, params);
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
}

ExponentField exponent_from_json(const Json& j) {
  try {
    if (j.is_string()) {
      const std::string s = j.get<std::string>();
      const auto at = s.find('@');
      if (at == std::string::npos) return parse_exponent(s);
      const auto b = numbers(s.substr(at + 1));
      if (b.size() != 4) throw ConfigError("exponent box needs x0,y0,x1,y1");
      return parse_exponent(s.substr(0, at), Box{Vec2(b[0], b[1]), Vec2(b[2], b[3])});
    }
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("exponent needs a kind");
    Box box = reference_box();
    if (j.contains("box")) {
      const auto b = j["box"].get<std::vector<double>>();
      if (b.size() != 4) throw ConfigError("exponent box needs x0,y0,x1,y1");
      box = Box{Vec2(b[0], b[1]), Vec2(b[2], b[3])};
    }
    const std::string kind = j["kind"].get<std::string>();
    if (j.contains("params")) return make_exponent(kind, j["params"].get<std::vector<double>>(), box);
    // Named fields: {"kind": "affine", "p0": 2, "a": [0.5, 0]} and friends.
    std::vector<double> params;
    if (kind == "constant" || kind == "const") {
      params = {j.contains("p") ? j["p"].get<double>() : j.at("p0").get<double>()};
    } else if (kind == "affine") {
      const auto a = j.at("a").get<std::vector<double>>();
      if (a.size() != 2) throw ConfigError("affine exponent needs a = [a1, a2]");
      params = {j.at("p0").get<double>(), a[0], a[1]};
    } else if (kind == "bump") {
      const auto c = j.value("center", std::vector<double>{0.0, 0.0});
      if (c.size() != 2) throw ConfigError("bump center needs two coordinates");
      params = {j.at("p0").get<double>(), j.at("amplitude").get<double>(), c[0], c[1], j.value("width", 1.0)};
    }
    return make_exponent(kind, params, box);
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("exponent: ") + e.what());
  }
}

SolveMethod parse_method(const std::string& name) {
  if (name == "picard") return SolveMethod::Picard;
  if (name == "damped-newton" || name == "newton") return SolveMethod::DampedNewton;
  throw ConfigError("unknown solver method '" + name + "'");
}

Json to_json(const Vec2& v) { return Json::array({v.x(), v.y()}); }

Json to_json(const HypothesisStatus& h) {
  Json a = Json::array();
  for (const auto& f : h) a.push_back({{"name", f.name}, {"holds", f.holds}});
  return a;
}

Json to_json(const SolveReport& r) {
  return {{"energy", r.energy},         {"residual_norm", r.residual_norm}, {"iterations", r.iterations},
          {"converged", r.converged},   {"tol", r.tol},                     {"epsilon", r.epsilon},
          {"method", r.method}};
}

Json to_json(const CertificationReport& r) {
  auto num = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  return {{"family", to_string(r.family)},
          {"mu", r.mu},
          {"mu_star", num(r.mu_star)},
          {"r", r.r},
          {"r_star", r.r_star},
          {"M", r.M},
          {"n", r.n},
          {"worst_sign", r.worst_sign},
          {"worst_point", to_json(r.worst_point)},
          {"samples", r.samples},
          {"slack", r.slack},
          {"max_abs_log_grad", r.max_abs_log_grad},
          {"log_envelope", num(r.log_envelope)},
          {"log_envelope_ok", r.log_envelope_ok},
          {"boundary_error", r.boundary_error},
          {"annulus_in_box", r.annulus_in_box},
          {"guaranteed", !r.forced},
          {"passed", r.passed}};
}

unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PXHARM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) n = static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return n;
}

namespace {

// One Dirichlet problem; covering problems extend by zero outside the domain.
struct Problem {
  Json domain;
  Json exponent;
  std::string data;
  double h = 0.0;
  bool covering = false;
  Box box;

  /// Problems with equal grid keys share one mesh, so their fields can be compared node by node.
  std::string grid_key() const {
    std::ostringstream k;
    k.precision(17);
    k << domain.dump() << '|' << h << '|' << covering;
    if (covering) k << '|' << box.lo.x() << ',' << box.lo.y() << ',' << box.hi.x() << ',' << box.hi.y();
    return k.str();
  }
  std::string key() const { return grid_key() + '|' + exponent.dump() + '|' + data; }
};

struct Solved {
  GridPtr grid;
  Solution sol;
};

struct CheckCtx {
  std::size_t index = 0;
  std::string kind;
  Json params;
  Json domain_json;
  Json exponent_json;
  std::string data;
  double h = 0.0;
  std::optional<Domain> domain;
  std::optional<ExponentField> exponent;
};

Vec2 point(const Json& params, const char* key) {
  if (!params.contains(key)) throw ConfigError(std::string("missing parameter '") + key + "'");
  const auto v = params[key].get<std::vector<double>>();
  if (v.size() != 2) throw ConfigError(std::string("parameter '") + key + "' needs two coordinates");
  return Vec2(v[0], v[1]);
}

double positive(const Json& params, const char* key, std::optional<double> def = std::nullopt) {
  double v;
  if (params.contains(key)) {
    v = params[key].get<double>();
  } else if (def) {
    v = *def;
  } else {
    throw ConfigError(std::string("missing parameter '") + key + "'");
  }
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("parameter '") + key + "' must be positive");
  return v;
}

const Domain& need_domain(const CheckCtx& c) {
  if (!c.domain) throw ConfigError("check '" + c.kind + "' needs a domain");
  return *c.domain;
}

const ExponentField& need_exponent(const CheckCtx& c) {
  if (!c.exponent) throw ConfigError("check '" + c.kind + "' needs an exponent");
  return *c.exponent;
}

void need_boundary_point(const Domain& d, const Vec2& w) {
  if (std::abs(d.signed_dist(w)) > 1e-9) throw ConfigError("window center must lie on the domain boundary");
}

Problem body_problem(const CheckCtx& c, const std::string& data) {
  const Domain& d = need_domain(c);
  need_exponent(c);
  if (!(c.h > 0.0)) throw ConfigError("check '" + c.kind + "' needs a grid step h");
  if (c.h > d.feature_size() / 4.0) throw ConfigError("h too coarse for the domain's ball radius");
  parse_data(data);
  return Problem{c.domain_json, c.exponent_json, data, c.h, false, {}};
}

std::string data_or_default(const CheckCtx& c, const char* key) {
  if (c.params.contains(key)) return c.params[key].get<std::string>();
  if (c.data.empty()) throw ConfigError("check '" + c.kind + "' needs boundary data");
  return c.data;
}

const std::map<std::string, std::string>& ref_tags() {
  static const std::map<std::string, std::string> tags{
      {"solve", "weak-formulation"},
      {"barrier", "barrier-lemma"},
      {"harnack", "interior-harnack"},
      {"harnack-chain", "harnack-chain-count"},
      {"quasihyperbolic", "quasihyperbolic-metric"},
      {"oscillation", "boundary-oscillation-decay"},
      {"interior-oscillation", "interior-oscillation-decay"},
      {"carleson", "carleson-estimate"},
      {"boundary-decay", "boundary-harnack-decay"},
      {"boundary-harnack", "boundary-harnack-ratio"},
      {"riesz-measure", "riesz-measure-existence"},
      {"capacity", "relative-capacity"},
      {"fatness", "uniform-fatness"},
      {"comparison", "comparison-principle"},
  };
  return tags;
}

// Returns the problems a check needs; throws ConfigError on invalid parameters.
std::vector<Problem> plan(const CheckCtx& c) {
  const Json& p = c.params;
  const std::string& k = c.kind;
  if (!ref_tags().count(k)) throw ConfigError("unknown check '" + k + "'");
  try {
    if (k == "solve") return {body_problem(c, data_or_default(c, "data"))};
    if (k == "barrier") {
      need_exponent(c);
      parse_barrier_family(p.value("family", std::string("wolanski-super")));
      positive(p, "M", 1.0);
      positive(p, "r");
      if (p.contains("mu")) positive(p, "mu");
      return {};
    }
    if (k == "harnack") {
      const Domain& d = need_domain(c);
      const double r = positive(p, "r");
      if (d.signed_dist(point(p, "center")) < 4.0 * r) throw ConfigError("harnack ball B(center, 4r) exits the domain");
      return {body_problem(c, data_or_default(c, "data"))};
    }
    if (k == "quasihyperbolic") {
      const Domain& d = need_domain(c);
      const Vec2 x = point(p, "x"), y = point(p, "y");
      const double step = p.contains("grid_step") ? positive(p, "grid_step")
                                                  : std::min(d.signed_dist(x), d.signed_dist(y)) / 10.0;
      if (d.signed_dist(x) <= step || d.signed_dist(y) <= step) throw ConfigError("endpoints too close to the boundary");
      return {};
    }
    if (k == "harnack-chain") {
      const Domain& d = need_domain(c);
      const Vec2 w = point(p, "w");
      need_boundary_point(d, w);
      const double r = positive(p, "r"), M = d.regularity().M_uniform;
      for (const char* key : {"x", "y"}) {
        const Vec2 z = point(p, key);
        if ((z - w).norm() >= r / M || d.signed_dist(z) <= 0.0) throw ConfigError("chain endpoints must lie in B(w, r/M)");
      }
      return {};
    }
    if (k == "oscillation" || k == "carleson" || k == "boundary-decay" || k == "boundary-harnack") {
      const Domain& d = need_domain(c);
      const Vec2 w = point(p, "w");
      need_boundary_point(d, w);
      const double r = positive(p, "r");
      if (k == "carleson") {
        const double cp = p.value("c_prime", 2.0);
        if (cp < 1.0) throw ConfigError("c_prime must be at least 1");
        if (r / cp > d.regularity().r_interior / 2.0) throw ConfigError("no corkscrew at this scale");
      }
      if (k == "boundary-decay" || k == "boundary-harnack") {
        if (d.regularity().r_ball <= 0.0) throw ConfigError("boundary decay needs the ball condition");
        if (p.value("c_tilde", 6.0) < 1.0) throw ConfigError("c_tilde must be at least 1");
      }
      if (k == "oscillation" && p.value("levels", 5) < 3) throw ConfigError("need at least 3 levels");
      std::vector<Problem> out{body_problem(c, data_or_default(c, "data"))};
      if (k == "boundary-harnack") out.push_back(body_problem(c, data_or_default(c, "data2")));
      return out;
    }
    if (k == "interior-oscillation") {
      const Domain& d = need_domain(c);
      const double r = positive(p, "r");
      if (d.signed_dist(point(p, "center")) < r) throw ConfigError("interior ball exits the domain");
      return {body_problem(c, data_or_default(c, "data"))};
    }
    if (k == "comparison") {
      return {body_problem(c, data_or_default(c, "data")), body_problem(c, data_or_default(c, "data2"))};
    }
    if (k == "riesz-measure") {
      const Domain& d = need_domain(c);
      need_exponent(c);
      const Vec2 w = point(p, "w");
      need_boundary_point(d, w);
      const double r = positive(p, "r");
      const double h = p.contains("h") ? positive(p, "h") : c.h;
      if (!(h > 0.0) || h > d.feature_size() / 4.0) throw ConfigError("riesz-measure needs a resolvable h");
      const std::string data = data_or_default(c, "data");
      parse_data(data);
      return {Problem{c.domain_json, c.exponent_json, data, h, true,
                      Box{w - Vec2(2 * r, 2 * r), w + Vec2(2 * r, 2 * r)}}};
    }
    if (k == "capacity") {
      need_exponent(c);
      positive(p, "r");
      point(p, "center");
      const double h = p.contains("h") ? positive(p, "h") : c.h;
      if (!(h > 0.0)) throw ConfigError("capacity needs h");
      return {};
    }
    if (k == "fatness") {
      const Domain& d = need_domain(c);
      need_exponent(c);
      const Vec2 x = point(p, "x");
      const double r = positive(p, "r");
      if (d.signed_dist(x) > 0.0) throw ConfigError("fatness point must lie outside the domain");
      if (r > d.regularity().r_nta) throw ConfigError("radius exceeds the NTA scale");
      const double h = p.contains("h") ? positive(p, "h") : c.h;
      if (!(h > 0.0)) throw ConfigError("fatness needs h");
      return {};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("check '" + k + "': " + e.what());
  }
  return {};
}

GridPtr problem_grid(const Problem& pr) {
  const Domain d = domain_from_json(pr.domain);
  return pr.covering ? build_covering_grid(d, pr.box, pr.h) : build_grid(d, pr.h);
}

Solved solve_problem(const Problem& pr, const GridPtr& grid, const SolveOptions& opts) {
  const ExponentField p = exponent_from_json(pr.exponent);
  const BoundaryData g = parse_data(pr.data);
  return Solved{grid, solve_dirichlet(grid, p, g, opts)};
}

Json window_json(const Vec2& c, double r) { return {{"center", to_json(c)}, {"radius", r}}; }

struct Outcome {
  Json values = Json::object();
  HypothesisStatus hypotheses;
  Json window = nullptr;
  double h = std::numeric_limits<double>::quiet_NaN();
  std::optional<bool> passed;  ///< empty: report only
  std::string assertion;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

Outcome execute(const CheckCtx& c, const std::map<std::string, Solved>& solved, const SolveOptions& opts,
                const std::filesystem::path& out_dir, bool plots) {
  const Json& p = c.params;
  const std::string& k = c.kind;
  Outcome o;
  auto field = [&](const std::string& data) -> const Solved& {
    return solved.at(body_problem(c, data).key());
  };
  const std::string tag = "check" + std::to_string(c.index);

  if (k == "solve") {
    const Solved& s = field(data_or_default(c, "data"));
    const auto& u = s.sol.u;
    const auto& g = *s.grid;
    double bmin = std::numeric_limits<double>::infinity(), bmax = -bmin, imin = bmin, imax = -bmin;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.node_kind[i] == NodeKind::Interior) {
        imin = std::min(imin, u[i]);
        imax = std::max(imax, u[i]);
      } else {
        bmin = std::min(bmin, u[i]);
        bmax = std::max(bmax, u[i]);
      }
    }
    const double slack = 1e-8 * std::max(bmax - bmin, 1.0);
    const bool maxp = g.count(NodeKind::Interior) == 0 || (imin >= bmin - slack && imax <= bmax + slack);
    o.values = to_json(s.sol.report);
    o.values["nodes"] = g.size();
    o.values["interior_nodes"] = g.count(NodeKind::Interior);
    o.values["boundary_range"] = {bmin, bmax};
    o.values["interior_range"] = {imin, imax};
    o.values["maximum_principle"] = maxp;
    o.h = g.h;
    o.passed = s.sol.report.converged && maxp;
    o.assertion = "solver converged and the maximum principle holds";
    if (!out_dir.empty()) {
      std::ostringstream csv;
      write_field_csv(csv, u);
      write_text(out_dir / (tag + "_field.csv"), csv.str());
      o.values["field_csv"] = tag + "_field.csv";
      if (plots) {
        std::istringstream in(csv.str());
        write_text(out_dir / (tag + "_field.svg"), plot_csv(in));
      }
    }
    return o;
  }
  if (k == "barrier") {
    const ExponentField& ex = need_exponent(c);
    BarrierSpec spec;
    spec.family = parse_barrier_family(p.value("family", std::string("wolanski-super")));
    spec.center = p.contains("center") ? point(p, "center") : Vec2::Zero();
    spec.height = positive(p, "M", 1.0);
    spec.radius = positive(p, "r");
    const int n = p.value("n", 2);
    if (p.contains("mu")) {
      spec.mu = positive(p, "mu");
    } else if (is_wolanski(spec.family)) {
      spec.mu = wolanski_mu_star(ex, spec.height, spec.radius, n);
    } else {
      spec.mu = bauman_mu_default(ex, n);
    }
    CertifyOptions copts;
    copts.samples = p.value("samples", 10000);
    copts.force = p.value("force", false);
    const CertificationReport rep = certify(spec, ex, n, copts);
    o.values = to_json(rep);
    o.hypotheses = {{"mu >= mu_star", !rep.forced}, {"r <= r_star", rep.r <= rep.r_star * (1 + 1e-12)},
                    {"exponent bounds cover the annulus", rep.annulus_in_box}};
    o.window = window_json(spec.center, 2.0 * spec.radius);
    o.passed = rep.passed;
    o.assertion = is_super(spec.family) ? "operator <= 1e-8 on the annulus sample" : "operator >= -1e-8 on the annulus sample";
    return o;
  }
  if (k == "harnack") {
    const Solved& s = field(data_or_default(c, "data"));
    const Vec2 x = point(p, "center");
    const double r = positive(p, "r");
    o.values["c_H"] = harnack_constant(s.sol.u, need_domain(c), x, r);
    o.window = window_json(x, r);
    o.h = s.grid->h;
    o.hypotheses = {{"u >= 0 on B(center, 4r)", ball_extrema(s.sol.u, x, 4 * r).min >= 0.0}};
    return o;
  }
  if (k == "quasihyperbolic") {
    const Domain& d = need_domain(c);
    const Vec2 x = point(p, "x"), y = point(p, "y");
    const double step = p.contains("grid_step") ? positive(p, "grid_step")
                                                : std::min(d.signed_dist(x), d.signed_dist(y)) / 10.0;
    const auto path = quasihyperbolic_path(d, x, y, step);
    const double back = quasihyperbolic_distance(d, y, x, step);
    const double lower = std::abs(std::log(d.signed_dist(y) / d.signed_dist(x)));
    o.values = {{"k", path.length}, {"k_reverse", back}, {"log_distance_ratio", lower},
                {"grid_step", step}, {"explored", path.explored}};
    o.h = step;
    o.passed = std::abs(path.length - back) <= 1e-9 && path.length >= lower * (1 - 1e-12);
    o.assertion = "symmetric within 1e-9 and at least |log(d(y)/d(x))|";
    return o;
  }
  if (k == "harnack-chain") {
    const Domain& d = need_domain(c);
    const Vec2 w = point(p, "w");
    const double r = positive(p, "r");
    const auto chain = harnack_chain(d, w, r, point(p, "x"), point(p, "y"));
    o.values = {{"count", chain.count},
                {"bound", chain.bound},
                {"quasihyperbolic", chain.quasihyperbolic},
                {"M", chain.M},
                {"consecutive_intersect", chain.consecutive_intersect},
                {"doubled_inside_window", chain.doubled_inside_window}};
    o.hypotheses = {{"M' = M (uniform-curve constant taken equal to the domain's)", true},
                    {"M analytic", !d.regularity().M_empirical}};
    o.window = window_json(w, r);
    o.passed = chain.within_bound() && chain.consecutive_intersect;
    o.assertion = "N <= 9M^2 + 3M log(d(y)/d(x)) and consecutive balls intersect";
    return o;
  }
  if (k == "oscillation" || k == "interior-oscillation") {
    const Solved& s = field(data_or_default(c, "data"));
    const double r = positive(p, "r");
    const int levels = p.value("levels", 5);
    DecayFit fit;
    Vec2 center;
    if (k == "oscillation") {
      center = point(p, "w");
      fit = oscillation_decay(s.sol.u, center, r, levels);
      const ExponentField& ex = need_exponent(c);
      o.hypotheses = {{"p+ <= n or p- > n", ex.p_plus() <= 2.0 || ex.p_minus() > 2.0}};
    } else {
      center = point(p, "center");
      fit = interior_oscillation_decay(s.sol.u, need_domain(c), center, r, levels);
    }
    o.values = {{"exponent", fit.exponent},   {"prefactor", fit.prefactor},
                {"residual", fit.residual},   {"envelope_constant", fit.envelope_constant},
                {"radii", fit.radii},         {"values", fit.values},
                {"exponent_in_range", fit.exponent_in_range}};
    o.window = window_json(center, r);
    o.h = s.grid->h;
    if (!out_dir.empty()) {
      std::ostringstream csv;
      csv.precision(17);
      csv << "radius,value\n";
      for (std::size_t i = 0; i < fit.radii.size(); ++i) csv << fit.radii[i] << ',' << fit.values[i] << '\n';
      write_text(out_dir / (tag + "_profile.csv"), csv.str());
      if (plots) {
        std::istringstream in(csv.str());
        write_text(out_dir / (tag + "_profile.svg"), plot_csv(in));
      }
    }
    return o;
  }
  if (k == "carleson") {
    const Solved& s = field(data_or_default(c, "data"));
    const Vec2 w = point(p, "w");
    const double r = positive(p, "r");
    const auto rep = carleson_check(s.sol.u, need_domain(c), w, r, p.value("c_prime", 2.0));
    o.values = {{"ratio", rep.ratio},
                {"sup", rep.sup},
                {"corkscrew_value", rep.corkscrew_value},
                {"corkscrew_point", to_json(rep.corkscrew_point)},
                {"r_prime", rep.r_prime},
                {"c_prime", p.value("c_prime", 2.0)}};
    o.window = window_json(w, rep.r_prime);
    o.h = s.grid->h;
    o.passed = std::isfinite(rep.ratio) && rep.ratio > 0.0;
    o.assertion = "finite positive empirical constant";
    return o;
  }
  if (k == "boundary-decay" || k == "boundary-harnack") {
    const Solved& s = field(data_or_default(c, "data"));
    const Domain& d = need_domain(c);
    const Vec2 w = point(p, "w");
    const double r = positive(p, "r"), ct = p.value("c_tilde", 6.0);
    RatioReport rr;
    if (k == "boundary-decay") {
      rr = boundary_decay(s.sol.u, d, w, r, ct);
    } else {
      const auto bh = boundary_harnack(s.sol.u, field(data_or_default(c, "data2")).sol.u, d, w, r, ct);
      rr = bh.ratio;
      o.values["four_point"] = bh.four_point;
    }
    o.values["lower"] = rr.lower;
    o.values["upper"] = rr.upper;
    o.values["nodes"] = rr.nodes;
    o.values["c_tilde"] = ct;
    o.window = window_json(rr.window.center, rr.window.radius);
    o.h = rr.h;
    o.hypotheses = {{"ball condition", d.regularity().r_ball > 0.0}};
    o.passed = rr.lower > 0.0 && std::isfinite(rr.upper);
    o.assertion = "0 < lower <= upper < inf";
    return o;
  }
  if (k == "comparison") {
    const auto& u1 = field(data_or_default(c, "data")).sol;
    const auto& u2 = field(data_or_default(c, "data2")).sol;
    const double tol = p.value("tol", 1e-8);
    const auto rep = check_comparison(u1.u, u2.u, tol);
    o.values = {{"min_difference", rep.min_difference}, {"location", to_json(rep.location)}, {"tol", tol}};
    o.h = u1.u.grid->h;
    o.passed = !rep.violated;
    o.assertion = "min over interior nodes of u1 - u2 >= -tol";
    return o;
  }
  if (k == "riesz-measure") {
    need_domain(c);
    const ExponentField& ex = need_exponent(c);
    const Vec2 w = point(p, "w");
    const double r = positive(p, "r");
    const double h = p.contains("h") ? positive(p, "h") : c.h;
    const std::string data = data_or_default(c, "data");
    const Problem pr{c.domain_json, c.exponent_json, data, h, true, Box{w - Vec2(2 * r, 2 * r), w + Vec2(2 * r, 2 * r)}};
    const Solved& s = solved.at(pr.key());
    const auto mu = riesz_measure(s.sol.u, ex, w, r);
    const auto& g = *s.grid;
    double bdry = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g.dist[i] == 0.0 && !g.on_hull[i]) bdry = std::max(bdry, std::abs(s.sol.u[i]));
    Json masses = Json::array();
    for (double sv : p.value("s", std::vector<double>{})) masses.push_back({{"s", sv}, {"mass", mu.mass(sv)}});
    o.values = {{"total", mu.total},       {"atoms", mu.atoms.size()}, {"min_atom", mu.min_atom()},
                {"masses", masses},        {"solve", to_json(s.sol.report)}};
    o.hypotheses = {{"u vanishes on the boundary in B(w, 2r)", bdry <= 1e-12},
                    {"solver converged", s.sol.report.converged}};
    o.window = window_json(w, r);
    o.h = g.h;
    o.passed = mu.min_atom() >= -1e-10;
    o.assertion = "all atoms >= -1e-10";
    if (!out_dir.empty()) {
      std::ostringstream csv;
      write_measure_csv(csv, mu);
      write_text(out_dir / (tag + "_measure.csv"), csv.str());
    }
    return o;
  }
  if (k == "capacity") {
    const ExponentField& ex = need_exponent(c);
    const Vec2 x = point(p, "center");
    const double r = positive(p, "r");
    const double h = p.contains("h") ? positive(p, "h") : c.h;
    const auto res = relative_capacity(CapacitySet::ClosedBall, x, r, ex, h, nullptr, opts);
    o.values = {{"capacity", res.capacity}, {"set_nodes", res.set_nodes}, {"solve", to_json(res.report)}};
    o.window = window_json(x, 2 * r);
    o.h = h;
    o.passed = res.report.converged;
    o.assertion = "capacity solve converged";
    return o;
  }
  if (k == "fatness") {
    const ExponentField& ex = need_exponent(c);
    const Vec2 x = point(p, "x");
    const double r = positive(p, "r");
    const double h = p.contains("h") ? positive(p, "h") : c.h;
    const auto rep = fatness_ratio(need_domain(c), ex, x, r, h, opts);
    o.values = {{"ratio", rep.ratio},
                {"complement_capacity", rep.complement_capacity},
                {"ball_capacity", rep.ball_capacity}};
    o.window = window_json(x, 2 * r);
    o.h = h;
    o.passed = rep.ratio > 0.0 && rep.ratio <= 1.0 + 1e-9;
    o.assertion = "0 < ratio <= 1";
    return o;
  }
  throw ConfigError("unknown check '" + k + "'");
}

}  // namespace

RunResult run_config(const Json& config, const std::filesystem::path& out_dir) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  if (!config.contains("checks") || !config["checks"].is_array() || config["checks"].empty())
    throw ConfigError("config needs a non-empty 'checks' array");

  SolveOptions opts;
  try {
    if (config.contains("solver")) {
      const Json& s = config["solver"];
      opts.epsilon = s.value("epsilon", -1.0);
      opts.tol = s.value("tol", -1.0);
      opts.max_iter = s.value("max_iter", 10000);
      opts.method = parse_method(s.value("method", std::string("damped-newton")));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }

  // Validate the whole plan before solving anything.
  std::vector<CheckCtx> checks;
  std::vector<Problem> problems;
  std::map<std::string, std::size_t> seen;
  const Json& list = config["checks"];
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Json& item = list[i];
    if (!item.is_object() || !item.contains("check")) throw ConfigError("check " + std::to_string(i) + " has no 'check' kind");
    CheckCtx c;
    c.index = i;
    try {
      c.kind = item["check"].get<std::string>();
      c.params = item;
      c.domain_json = item.contains("domain") ? item["domain"] : config.value("domain", Json(nullptr));
      c.exponent_json = item.contains("exponent") ? item["exponent"] : config.value("exponent", Json(nullptr));
      c.data = item.value("data", config.value("data", std::string()));
      c.h = item.value("h", config.value("h", 0.0));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("check " + std::to_string(i) + ": " + e.what());
    }
    if (!c.domain_json.is_null()) c.domain = domain_from_json(c.domain_json);
    if (!c.exponent_json.is_null()) c.exponent = exponent_from_json(c.exponent_json);
    for (auto& pr : plan(c)) {
      if (seen.emplace(pr.key(), problems.size()).second) problems.push_back(std::move(pr));
    }
    checks.push_back(std::move(c));
  }

  // Independent solves in parallel; results are keyed, so order does not matter.
  std::map<std::string, GridPtr> grids;
  for (const auto& pr : problems)
    if (!grids.count(pr.grid_key())) grids.emplace(pr.grid_key(), problem_grid(pr));

  std::map<std::string, Solved> solved;
  {
    const unsigned workers = std::min<unsigned>(worker_count(), std::max<std::size_t>(problems.size(), 1));
    std::vector<std::optional<Solved>> results(problems.size());
    std::vector<std::exception_ptr> errors(problems.size());
    std::size_t next = 0;
    std::mutex m;
    auto worker = [&] {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(m);
          if (next >= problems.size()) return;
          i = next++;
        }
        try {
          results[i] = solve_problem(problems[i], grids.at(problems[i].grid_key()), opts);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < problems.size(); ++i) {
      if (errors[i]) std::rethrow_exception(errors[i]);
      solved.emplace(problems[i].key(), std::move(*results[i]));
    }
  }

  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  const bool plots = config.value("plots", false);
  RunResult result;
  Json records = Json::array();
  for (const auto& c : checks) {
    Outcome o = execute(c, solved, opts, out_dir, plots);
    Json rec;
    rec["check"] = c.kind;
    rec["index"] = c.index;
    rec["paper_ref_tag"] = ref_tags().at(c.kind);
    rec["hypothesis_status"] = to_json(o.hypotheses);
    rec["h"] = std::isfinite(o.h) ? Json(o.h) : Json(nullptr);
    rec["window"] = o.window;
    rec["domain"] = c.domain ? Json(c.domain->describe()) : Json(nullptr);
    rec["exponent"] = c.exponent ? Json(c.exponent->describe()) : Json(nullptr);
    rec["values"] = o.values;
    rec["assertion"] = o.assertion.empty() ? Json(nullptr) : Json(o.assertion);
    rec["passed"] = o.passed ? Json(*o.passed) : Json(nullptr);
    if (o.passed && !*o.passed) result.failures.push_back("check " + std::to_string(c.index) + " (" + c.kind + "): " + o.assertion);
    records.push_back(std::move(rec));
  }
  result.report["records"] = std::move(records);
  result.report["seed"] = config.value("seed", 0);
  result.report["passed"] = result.passed();
  if (!out_dir.empty()) write_text(out_dir / "report.json", result.report.dump(2) + "\n");
  return result;
}

int run_with_exit_code(const Json& config, const std::filesystem::path& out_dir, std::ostream& err) {
  try {
    const RunResult r = run_config(config, out_dir);
    for (const auto& f : r.failures) err << "assertion failed: " << f << '\n';
    return r.passed() ? 0 : 1;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace pxharm::cli
