#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "pxharm/estimates.hpp"

namespace pxharm::cli {

namespace {

constexpr double kW = 640, kH = 480, kPad = 60;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string header() {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n"
         "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
}

std::string axes(const std::string& xlabel, const std::string& ylabel) {
  std::string s;
  s += "<line x1=\"" + fmt(kPad) + "\" y1=\"" + fmt(kH - kPad) + "\" x2=\"" + fmt(kW - kPad) + "\" y2=\"" +
       fmt(kH - kPad) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fmt(kPad) + "\" y1=\"" + fmt(kPad) + "\" x2=\"" + fmt(kPad) + "\" y2=\"" + fmt(kH - kPad) +
       "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + fmt(kW / 2) + "\" y=\"" + fmt(kH - 20) + "\" text-anchor=\"middle\" font-size=\"14\">" + xlabel +
       "</text>\n";
  s += "<text x=\"20\" y=\"" + fmt(kH / 2) + "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 " +
       fmt(kH / 2) + ")\">" + ylabel + "</text>\n";
  return s;
}

// Blue to red through white.
std::string color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  int r, g, b;
  if (t < 0.5) {
    const double s = t / 0.5;
    r = static_cast<int>(std::lround(40 + s * 215));
    g = static_cast<int>(std::lround(70 + s * 185));
    b = 255;
  } else {
    const double s = (t - 0.5) / 0.5;
    r = 255;
    g = static_cast<int>(std::lround(255 - s * 185));
    b = static_cast<int>(std::lround(255 - s * 215));
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string tok;
  std::stringstream ss(line);
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_number(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("malformed CSV at line " + std::to_string(line) + ": '" + s + "'");
  }
}

}  // namespace

std::string field_heatmap_svg(const std::vector<std::array<double, 3>>& rows) {
  std::string s = header() + axes("x1", "x2");
  if (rows.empty()) return s + "</svg>\n";
  double x0 = rows[0][0], x1 = x0, y0 = rows[0][1], y1 = y0, v0 = rows[0][2], v1 = v0;
  for (const auto& r : rows) {
    x0 = std::min(x0, r[0]);
    x1 = std::max(x1, r[0]);
    y0 = std::min(y0, r[1]);
    y1 = std::max(y1, r[1]);
    v0 = std::min(v0, r[2]);
    v1 = std::max(v1, r[2]);
  }
  const double span = std::max({x1 - x0, y1 - y0, 1e-300});
  const double scale = std::min(kW, kH) - 2 * kPad;
  const double cell = std::max(1.0, scale / std::sqrt(static_cast<double>(rows.size())));
  for (const auto& r : rows) {
    const double px = kPad + (r[0] - x0) / span * scale;
    const double py = kH - kPad - (r[1] - y0) / span * scale;
    const double t = v1 > v0 ? (r[2] - v0) / (v1 - v0) : 0.5;
    s += "<rect x=\"" + fmt(px - cell / 2) + "\" y=\"" + fmt(py - cell / 2) + "\" width=\"" + fmt(cell) +
         "\" height=\"" + fmt(cell) + "\" fill=\"" + color(t) + "\"/>\n";
  }
  s += "<text x=\"" + fmt(kW - kPad) + "\" y=\"40\" text-anchor=\"end\" font-size=\"12\">range [" + fmt(v0) + ", " +
       fmt(v1) + "]</text>\n";
  return s + "</svg>\n";
}

std::string profile_svg(const std::vector<std::pair<double, double>>& rows) {
  std::string s = header() + axes("log radius", "log value");
  std::vector<double> radii, values;
  for (const auto& [r, v] : rows) {
    if (r > 0.0 && v > 0.0) {
      radii.push_back(r);
      values.push_back(v);
    }
  }
  if (radii.empty()) return s + "</svg>\n";
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    lx.push_back(std::log(radii[i]));
    ly.push_back(std::log(values[i]));
  }
  const auto [xa, xb] = std::minmax_element(lx.begin(), lx.end());
  const auto [ya, yb] = std::minmax_element(ly.begin(), ly.end());
  const double X0 = *xa, X1 = *xb > *xa ? *xb : *xa + 1, Y0 = *ya, Y1 = *yb > *ya ? *yb : *ya + 1;
  auto px = [&](double x) { return kPad + (x - X0) / (X1 - X0) * (kW - 2 * kPad); };
  auto py = [&](double y) { return kH - kPad - (y - Y0) / (Y1 - Y0) * (kH - 2 * kPad); };
  for (std::size_t i = 0; i < lx.size(); ++i)
    s += "<circle cx=\"" + fmt(px(lx[i])) + "\" cy=\"" + fmt(py(ly[i])) + "\" r=\"4\" fill=\"#1f4e9c\"/>\n";
  if (radii.size() >= 2) {
    const DecayFit fit = fit_decay(radii, values, 1.0, 1.0);
    const double c = std::log(fit.prefactor);
    s += "<line x1=\"" + fmt(px(X0)) + "\" y1=\"" + fmt(py(c + fit.exponent * X0)) + "\" x2=\"" + fmt(px(X1)) +
         "\" y2=\"" + fmt(py(c + fit.exponent * X1)) + "\" stroke=\"#c0392b\"/>\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "slope = %.12g", fit.exponent);
    s += "<text x=\"" + fmt(kPad + 10) + "\" y=\"40\" font-size=\"14\">" + buf + "</text>\n";
  }
  return s + "</svg>\n";
}

std::string plot_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto head = split(line);
  const bool field = head.size() == 3 && head[0] == "x" && head[1] == "y";
  const bool profile = head.size() == 2 && head[0] == "radius";
  if (!field && !profile) throw std::runtime_error("unrecognized CSV header '" + line + "'");
  std::vector<std::array<double, 3>> frows;
  std::vector<std::pair<double, double>> prows;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split(line);
    if (cols.size() != head.size()) throw std::runtime_error("malformed CSV at line " + std::to_string(n));
    if (field) {
      frows.push_back({to_number(cols[0], n), to_number(cols[1], n), to_number(cols[2], n)});
    } else {
      prows.emplace_back(to_number(cols[0], n), to_number(cols[1], n));
    }
  }
  return field ? field_heatmap_svg(frows) : profile_svg(prows);
}

}  // namespace pxharm::cli
