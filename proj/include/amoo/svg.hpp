#ifndef AMOO_SVG_HPP
#define AMOO_SVG_HPP

#include <string>
#include <vector>

// Minimal self-contained SVG line plots (inline styling, no external
// assets). Log-log convergence plots carry reference slope guides for the
// 1/sqrt(k) and 1/k rates.

namespace amoo {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Renders the series on log10-log10 axes. Nonpositive values are dropped
// (they have no log coordinate). Slope guide lines of -1/2 and -1 are
// anchored near the top-left of the data.
std::string render_loglog_svg(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series);

}  // namespace amoo

#endif
