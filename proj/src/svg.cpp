#include "vtt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "vtt/csv.hpp"

namespace vtt::svg {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 56.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 44.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

void write_band_plot(const BandPlot& plot, const std::filesystem::path& path) {
  const std::size_t n = plot.x.size();
  if (n < 2 || plot.mean.size() != n || plot.lower.size() != n || plot.upper.size() != n) {
    throw std::invalid_argument("band plot series must share at least two points");
  }

  double y_min = plot.lower[0];
  double y_max = plot.upper[0];
  for (std::size_t i = 0; i < n; ++i) {
    y_min = std::min(y_min, plot.lower[i]);
    y_max = std::max(y_max, plot.upper[i]);
  }
  for (const auto& p : plot.points) {
    y_min = std::min(y_min, p.y);
    y_max = std::max(y_max, p.y);
  }
  if (y_max - y_min < 1e-9) y_max = y_min + 1.0;
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;

  const double x_min = plot.x.front();
  const double x_max = plot.x.back();
  auto sx = [&](double x) {
    return kMarginLeft + (x - x_min) / (x_max - x_min) * (kWidth - kMarginLeft - kMarginRight);
  };
  auto sy = [&](double y) {
    return kHeight - kMarginBottom -
           (y - y_min) / (y_max - y_min) * (kHeight - kMarginTop - kMarginBottom);
  };

  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (!plot.title.empty()) {
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << plot.title << "</text>\n";
  }

  // Confidence band as one closed polygon: upper edge forward, lower back.
  out << "<path fill=\"#9ecae1\" fill-opacity=\"0.55\" stroke=\"none\" d=\"M";
  for (std::size_t i = 0; i < n; ++i) {
    out << fmt(sx(plot.x[i])) << ' ' << fmt(sy(plot.upper[i])) << ' '
        << (i + 1 < n ? "L" : "");
  }
  for (std::size_t i = n; i-- > 0;) {
    out << "L" << fmt(sx(plot.x[i])) << ' ' << fmt(sy(plot.lower[i])) << ' ';
  }
  out << "Z\"/>\n";

  out << "<polyline fill=\"none\" stroke=\"#08519c\" stroke-width=\"1.5\" "
      << "stroke-dasharray=\"5,3\" points=\"";
  for (std::size_t i = 0; i < n; ++i) {
    out << fmt(sx(plot.x[i])) << ',' << fmt(sy(plot.mean[i])) << ' ';
  }
  out << "\"/>\n";

  for (const auto& p : plot.points) {
    out << "<circle cx=\"" << fmt(sx(p.x)) << "\" cy=\"" << fmt(sy(p.y))
        << "\" r=\"3\" fill=\"#de2d26\"/>\n";
  }

  // Axes with ticks at the answer-region boundaries.
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kHeight - kMarginBottom
      << "\" x2=\"" << kWidth - kMarginRight << "\" y2=\"" << kHeight - kMarginBottom
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\""
      << kMarginLeft << "\" y2=\"" << kHeight - kMarginBottom << "\" stroke=\"black\"/>\n";
  for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    if (tick < x_min || tick > x_max) continue;
    out << "<line x1=\"" << fmt(sx(tick)) << "\" y1=\"" << kHeight - kMarginBottom
        << "\" x2=\"" << fmt(sx(tick)) << "\" y2=\"" << kHeight - kMarginBottom + 5
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << fmt(sx(tick)) << "\" y=\"" << kHeight - kMarginBottom + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << csv::format_double(tick) << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double y = y_min + (y_max - y_min) * i / 4.0;
    out << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << fmt(sy(y)) << "\" x2=\""
        << kMarginLeft << "\" y2=\"" << fmt(sy(y)) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << fmt(sy(y) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(y) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace vtt::svg
