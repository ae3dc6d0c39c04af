#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cli_util.hpp"

namespace fmppcli {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Range {
  double lo = 0, hi = 1;
  void grow(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

/// Round ticks: ~5 steps of 1/2/5 x 10^k covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  double span = hi - lo;
  if (!(span > 0)) return {lo};
  double raw = span / 5;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  std::vector<double> out;
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + 1e-9 * span; t += step) out.push_back(t == 0 ? 0.0 : t);
  return out;
}

}  // namespace

std::string plot_svg(const std::vector<PlotSeries>& series,
                     const std::optional<PlotBand>& band,
                     const PlotLabels& labels) {
  bool any_finite = false;
  for (const PlotSeries& s : series)
    for (std::size_t i = 0; i < s.y.size(); ++i)
      any_finite |= std::isfinite(s.y[i]) && std::isfinite(s.x[i]);
  if (!any_finite)
    throw CliError(FMPP_ERR_EMPTY_SERIES, "plot has no finite data points");

  // data ranges
  bool first = true;
  double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  auto grow = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    if (first) {
      xlo = xhi = x;
      ylo = yhi = y;
      first = false;
    } else {
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  };
  for (const PlotSeries& s : series)
    for (std::size_t i = 0; i < s.y.size(); ++i) grow(s.x[i], s.y[i]);
  if (band)
    for (std::size_t i = 0; i < band->x.size(); ++i) {
      grow(band->x[i], band->lo[i]);
      grow(band->x[i], band->hi[i]);
    }
  if (xhi == xlo) xhi = xlo + 1;
  if (yhi == ylo) {
    yhi = ylo + (ylo == 0 ? 1 : std::abs(ylo) * 0.1);
    ylo -= (ylo == 0 ? 1 : std::abs(ylo) * 0.1);
  } else {
    double pad = 0.05 * (yhi - ylo);
    ylo -= pad;
    yhi += pad;
  }

  const double W = 640, H = 420;
  const double ml = 70, mr = 20, mt = 36, mb = 50;
  auto sx = [&](double x) {
    return ml + (x - xlo) / (xhi - xlo) * (W - ml - mr);
  };
  auto sy = [&](double y) {
    return H - mb - (y - ylo) / (yhi - ylo) * (H - mt - mb);
  };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
         "width=\""
      << num(W) << "\" height=\"" << num(H) << "\" viewBox=\"0 0 " << num(W)
      << " " << num(H) << "\">\n"
      << "<rect width=\"" << num(W) << "\" height=\"" << num(H)
      << "\" fill=\"white\"/>\n";

  // band under everything else
  if (band) {
    std::vector<std::pair<double, std::pair<double, double>>> pts;
    for (std::size_t i = 0; i < band->x.size(); ++i)
      if (std::isfinite(band->lo[i]) && std::isfinite(band->hi[i]))
        pts.push_back({band->x[i], {band->lo[i], band->hi[i]}});
    if (!pts.empty()) {
      out << "<polygon fill=\"" << band->color
          << "\" fill-opacity=\"0.6\" stroke=\"none\" points=\"";
      for (const auto& p : pts)
        out << num(sx(p.first)) << "," << num(sy(p.second.second)) << " ";
      for (auto it = pts.rbegin(); it != pts.rend(); ++it)
        out << num(sx(it->first)) << "," << num(sy(it->second.first)) << " ";
      out << "\"/>\n";
    }
  }

  // axes
  out << "<line x1=\"" << num(ml) << "\" y1=\"" << num(H - mb) << "\" x2=\""
      << num(W - mr) << "\" y2=\"" << num(H - mb)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << num(ml) << "\" y1=\"" << num(mt) << "\" x2=\""
      << num(ml) << "\" y2=\"" << num(H - mb)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (double t : ticks(xlo, xhi)) {
    out << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << num(H - mb)
        << "\" x2=\"" << num(sx(t)) << "\" y2=\"" << num(H - mb + 5)
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(H - mb + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\">"
        << num(t) << "</text>\n";
  }
  for (double t : ticks(ylo, yhi)) {
    out << "<line x1=\"" << num(ml - 5) << "\" y1=\"" << num(sy(t))
        << "\" x2=\"" << num(ml) << "\" y2=\"" << num(sy(t))
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(sy(t) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\" "
           "font-family=\"sans-serif\">"
        << num(t) << "</text>\n";
  }

  // series as gap-split polylines
  for (const PlotSeries& s : series) {
    std::vector<std::pair<double, double>> seg;
    auto flush = [&] {
      if (seg.size() >= 2) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& p : seg)
          out << num(sx(p.first)) << "," << num(sy(p.second)) << " ";
        out << "\"/>\n";
      } else if (seg.size() == 1) {
        out << "<circle cx=\"" << num(sx(seg[0].first)) << "\" cy=\""
            << num(sy(seg[0].second)) << "\" r=\"2\" fill=\"" << s.color
            << "\"/>\n";
      }
      seg.clear();
    };
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
        seg.push_back({s.x[i], s.y[i]});
      else
        flush();
    }
    flush();
  }

  // labels and legend
  if (!labels.title.empty())
    out << "<text x=\"" << num(W / 2) << "\" y=\"" << num(mt - 14)
        << "\" font-size=\"14\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\">"
        << labels.title << "</text>\n";
  if (!labels.xlabel.empty())
    out << "<text x=\"" << num((ml + W - mr) / 2) << "\" y=\""
        << num(H - 12)
        << "\" font-size=\"12\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\">"
        << labels.xlabel << "</text>\n";
  if (!labels.ylabel.empty())
    out << "<text x=\"16\" y=\"" << num((mt + H - mb) / 2)
        << "\" font-size=\"12\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" transform=\"rotate(-90 16 "
        << num((mt + H - mb) / 2) << ")\">" << labels.ylabel << "</text>\n";
  double ly = mt + 6;
  for (const PlotSeries& s : series) {
    if (s.label.empty()) continue;
    out << "<line x1=\"" << num(W - mr - 130) << "\" y1=\"" << num(ly)
        << "\" x2=\"" << num(W - mr - 106) << "\" y2=\"" << num(ly)
        << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"/>\n"
        << "<text x=\"" << num(W - mr - 100) << "\" y=\"" << num(ly + 4)
        << "\" font-size=\"11\" font-family=\"sans-serif\">" << s.label
        << "</text>\n";
    ly += 16;
  }

  out << "</svg>\n";
  return out.str();
}

}  // namespace fmppcli
