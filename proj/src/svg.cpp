#include "amoo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace amoo {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 160;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct LogRange {
  double lo = 0.0;
  double hi = 1.0;
  double to_px(double v, double px_lo, double px_hi) const {
    const double t = (v - lo) / (hi - lo);
    return px_lo + t * (px_hi - px_lo);
  }
};

}  // namespace

std::string render_loglog_svg(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series) {
  LogRange xr{std::numeric_limits<double>::max(),
              std::numeric_limits<double>::lowest()};
  LogRange yr = xr;
  for (const SvgSeries& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (s.x[i] <= 0 || s.y[i] <= 0) continue;
      xr.lo = std::min(xr.lo, std::log10(s.x[i]));
      xr.hi = std::max(xr.hi, std::log10(s.x[i]));
      yr.lo = std::min(yr.lo, std::log10(s.y[i]));
      yr.hi = std::max(yr.hi, std::log10(s.y[i]));
    }
  }
  if (xr.lo > xr.hi) { xr = {0.0, 1.0}; yr = {0.0, 1.0}; }
  if (xr.hi - xr.lo < 1e-9) xr.hi = xr.lo + 1.0;
  if (yr.hi - yr.lo < 1e-9) yr.hi = yr.lo + 1.0;
  yr.lo -= 0.05 * (yr.hi - yr.lo);
  yr.hi += 0.05 * (yr.hi - yr.lo);

  const double px0 = kMarginLeft, px1 = kWidth - kMarginRight;
  const double py0 = kHeight - kMarginBottom, py1 = kMarginTop;
  auto x_px = [&](double lg) { return xr.to_px(lg, px0, px1); };
  auto y_px = [&](double lg) { return yr.to_px(lg, py0, py1); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(kWidth) + "\" height=\"" + std::to_string(kHeight) +
         "\" viewBox=\"0 0 " + std::to_string(kWidth) + " " +
         std::to_string(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + std::to_string(kWidth / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + title + "</text>\n";

  // axes
  out += "<line x1=\"" + fmt(px0) + "\" y1=\"" + fmt(py0) + "\" x2=\"" +
         fmt(px1) + "\" y2=\"" + fmt(py0) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + fmt(px0) + "\" y1=\"" + fmt(py0) + "\" x2=\"" +
         fmt(px0) + "\" y2=\"" + fmt(py1) + "\" stroke=\"black\"/>\n";

  // decade ticks
  for (int d = static_cast<int>(std::ceil(xr.lo)); d <= std::floor(xr.hi); ++d) {
    const double px = x_px(d);
    out += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(py0) + "\" x2=\"" +
           fmt(px) + "\" y2=\"" + fmt(py0 + 5) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(py0) + "\" x2=\"" +
           fmt(px) + "\" y2=\"" + fmt(py1) +
           "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
    out += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(py0 + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">1e" + std::to_string(d) + "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(yr.lo)); d <= std::floor(yr.hi); ++d) {
    const double py = y_px(d);
    out += "<line x1=\"" + fmt(px0 - 5) + "\" y1=\"" + fmt(py) + "\" x2=\"" +
           fmt(px0) + "\" y2=\"" + fmt(py) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + fmt(px0) + "\" y1=\"" + fmt(py) + "\" x2=\"" +
           fmt(px1) + "\" y2=\"" + fmt(py) +
           "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
    out += "<text x=\"" + fmt(px0 - 8) + "\" y=\"" + fmt(py + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">1e" + std::to_string(d) + "</text>\n";
  }
  out += "<text x=\"" + std::to_string((kWidth - kMarginRight + kMarginLeft) / 2) +
         "\" y=\"" + std::to_string(kHeight - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
         x_label + "</text>\n";
  out += "<text x=\"16\" y=\"" + std::to_string(kHeight / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 16 " + std::to_string(kHeight / 2) + ")\">" +
         y_label + "</text>\n";

  // slope guides -1/2 and -1 anchored at the top-left of the data
  const double gx0 = xr.lo, gx1 = xr.hi;
  const double gy_anchor = yr.hi - 0.07 * (yr.hi - yr.lo);
  const double slopes[2] = {-0.5, -1.0};
  const char* slope_names[2] = {"slope -1/2", "slope -1"};
  for (int i = 0; i < 2; ++i) {
    const double y_end = gy_anchor + slopes[i] * (gx1 - gx0);
    out += "<line x1=\"" + fmt(x_px(gx0)) + "\" y1=\"" + fmt(y_px(gy_anchor)) +
           "\" x2=\"" + fmt(x_px(gx1)) + "\" y2=\"" + fmt(y_px(y_end)) +
           "\" stroke=\"#999999\" stroke-dasharray=\"6 4\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + fmt(x_px(gx1) + 4) + "\" y=\"" + fmt(y_px(y_end) + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#777777\">" +
           slope_names[i] + "</text>\n";
  }

  // series
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string points;
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (series[s].x[i] <= 0 || series[s].y[i] <= 0) continue;
      points += fmt(x_px(std::log10(series[s].x[i]))) + "," +
                fmt(y_px(std::log10(series[s].y[i]))) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.6\" points=\"" + points + "\"/>\n";
    const double ly = kMarginTop + 16.0 * static_cast<double>(s) + 10;
    out += "<line x1=\"" + fmt(px1 + 10) + "\" y1=\"" + fmt(ly - 4) +
           "\" x2=\"" + fmt(px1 + 30) + "\" y2=\"" + fmt(ly - 4) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fmt(px1 + 34) + "\" y=\"" + fmt(ly) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + series[s].label +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace amoo
