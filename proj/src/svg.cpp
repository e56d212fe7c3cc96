#include "cavity_anneal/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "cavity_anneal/csv.hpp"

namespace cavity_anneal::svg {

namespace {

constexpr double kWidth = 640, kHeight = 440;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 55;
constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                 "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (hi - lo < 1e-300) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

std::string fmt(double v) { return format_number(v); }

void frame(std::ostringstream& out, const std::string& title, const std::string& xl,
           const std::string& yl, const Range& xr, const Range& yr) {
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title) << "</text>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = kLeft + pw * i / 4.0, fy = kTop + ph - ph * i / 4.0;
    out << "<text x=\"" << fx << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">"
        << fmt(xr.lo + (xr.hi - xr.lo) * i / 4.0) << "</text>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << fy + 4 << "\" text-anchor=\"end\">"
        << fmt(yr.lo + (yr.hi - yr.lo) * i / 4.0) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << escape(xl) << "</text>\n";
  out << "<text transform=\"translate(16," << kTop + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(yl) << "</text>\n";
}

}  // namespace

std::string render(const LinePlot& plot) {
  Range xr, yr;
  for (const auto& s : plot.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.finish();
  yr.finish();

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + pw * (x - xr.lo) / (xr.hi - xr.lo); };
  auto py = [&](double y) { return kTop + ph - ph * (y - yr.lo) / (yr.hi - yr.lo); };

  std::ostringstream out;
  frame(out, plot.title, plot.x_label, plot.y_label, xr, yr);
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = kPalette[k % kPalette.size()];
    // Non-finite points split the polyline.
    std::string points;
    auto flush = [&] {
      if (!points.empty())
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
            << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"" << points
            << "\"/>\n";
      points.clear();
    };
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      points += fmt(px(s.x[i])) + "," + fmt(py(s.y[i])) + " ";
    }
    flush();
    const double ly = kTop + 14 + 18.0 * static_cast<double>(k);
    out << "<line x1=\"" << kWidth - kRight + 10 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << kWidth - kRight + 30 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\""
        << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n";
    out << "<text x=\"" << kWidth - kRight + 34 << "\" y=\"" << ly << "\">" << escape(s.name)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string render(const Heatmap& map) {
  Range xr, yr, vr;
  for (double v : map.x) xr.add(v);
  for (double v : map.y) yr.add(v);
  for (const auto& row : map.values)
    for (double v : row) vr.add(v);
  vr.finish();

  // Cells are centred on the grid values.
  auto half_step = [](const std::vector<double>& g) {
    return g.size() > 1 ? 0.5 * (g.back() - g.front()) / static_cast<double>(g.size() - 1) : 0.5;
  };
  const double hx = half_step(map.x), hy = half_step(map.y);
  xr.lo -= hx, xr.hi += hx;
  yr.lo -= hy, yr.hi += hy;
  xr.finish();
  yr.finish();

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + pw * (x - xr.lo) / (xr.hi - xr.lo); };
  auto py = [&](double y) { return kTop + ph - ph * (y - yr.lo) / (yr.hi - yr.lo); };
  auto color = [&](double v) {
    const double t = std::clamp((v - vr.lo) / (vr.hi - vr.lo), 0.0, 1.0);
    const int r = static_cast<int>(255 * t), b = static_cast<int>(255 * (1 - t));
    const int g = static_cast<int>(255 * (1 - std::abs(2 * t - 1)) * 0.8);
    std::ostringstream c;
    c << "rgb(" << r << "," << g << "," << b << ")";
    return c.str();
  };

  std::ostringstream out;
  frame(out, map.title, map.x_label, map.y_label, xr, yr);
  for (std::size_t j = 0; j < map.y.size() && j < map.values.size(); ++j)
    for (std::size_t i = 0; i < map.x.size() && i < map.values[j].size(); ++i) {
      const double v = map.values[j][i];
      if (!std::isfinite(v)) continue;
      const double x0 = px(map.x[i] - hx), x1 = px(map.x[i] + hx);
      const double y0 = py(map.y[j] + hy), y1 = py(map.y[j] - hy);
      out << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(x1 - x0)
          << "\" height=\"" << fmt(y1 - y0) << "\" fill=\"" << color(v) << "\"/>\n";
    }
  for (int k = 0; k <= 4; ++k) {
    const double v = vr.lo + (vr.hi - vr.lo) * k / 4.0;
    const double y = kTop + ph - ph * k / 4.0;
    out << "<rect x=\"" << kWidth - kRight + 12 << "\" y=\"" << y - 8
        << "\" width=\"16\" height=\"16\" fill=\"" << color(v) << "\"/>\n";
    out << "<text x=\"" << kWidth - kRight + 34 << "\" y=\"" << y + 4 << "\">" << fmt(v)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace cavity_anneal::svg
