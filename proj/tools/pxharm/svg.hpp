#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace pxharm::cli {

/// Heatmap of scattered nodal values (one square marker per row).
std::string field_heatmap_svg(const std::vector<std::array<double, 3>>& rows);

/// Log-log scatter of (radius, value) with the least-squares slope annotated.
std::string profile_svg(const std::vector<std::pair<double, double>>& rows);

/// Dispatches on the CSV header: "x,y,value" (or "x,y,atom") gives a heatmap,
/// "radius,value" a profile. Throws std::runtime_error on malformed input.
std::string plot_csv(std::istream& in);

}  // namespace pxharm::cli
