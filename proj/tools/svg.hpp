#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fmppcli {

/// One plotted curve; NaN y values break the polyline into gaps.
struct PlotSeries {
  std::vector<double> x, y;
  std::string label;
  std::string color = "#1f4e8c";
};

/// Shaded band between lo and hi; NaN entries are skipped.
struct PlotBand {
  std::vector<double> x, lo, hi;
  std::string color = "#9ecae1";
};

struct PlotLabels {
  std::string title, xlabel, ylabel;
};

/// Renders a self-contained SVG 1.1 line plot. Output bytes are a pure
/// function of the inputs. Throws fmpp::Error(FMPP_ERR_EMPTY_SERIES) when
/// no series has a finite point.
std::string plot_svg(const std::vector<PlotSeries>& series,
                     const std::optional<PlotBand>& band,
                     const PlotLabels& labels);

}  // namespace fmppcli
