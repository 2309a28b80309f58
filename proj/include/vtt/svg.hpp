#ifndef VTT_SVG_HPP
#define VTT_SVG_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace vtt::svg {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Minimal built-in plot writer: a filled confidence band, the mean polyline
// and observation dots over the unit x-axis. No external plotting
// dependency; the CSV next to it stays the canonical output.
struct BandPlot {
  std::string title;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Point> points;
};

void write_band_plot(const BandPlot& plot, const std::filesystem::path& path);

}  // namespace vtt::svg

#endif  // VTT_SVG_HPP
