#pragma once

#include <algorithm>
#include <cstdio>
#include <span>
#include <sstream>
#include <string>

#include "kmapper/relation.hpp"

namespace kmapper {

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string short_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

/// Scatter diagram as a standalone SVG document; x on the horizontal axis.
inline std::string scatter_svg(std::span<const ScatterPoint> points, std::string_view x_name,
                               std::string_view y_name, std::string_view caption = {}) {
  constexpr double width = 640, height = 480, left = 80, right = 30, top = 40, bottom = 70;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  if (!points.empty()) {
    auto [xa, xb] = std::minmax_element(points.begin(), points.end(), [](auto& a, auto& b) { return a.x < b.x; });
    auto [ya, yb] = std::minmax_element(points.begin(), points.end(), [](auto& a, auto& b) { return a.y < b.y; });
    xlo = xa->x, xhi = xb->x, ylo = ya->y, yhi = yb->y;
  }
  if (xhi == xlo) xlo -= 0.5, xhi += 0.5;
  if (yhi == ylo) ylo -= 0.5, yhi += 0.5;
  auto px = [&](double v) { return left + (v - xlo) / (xhi - xlo) * plot_w; };
  auto py = [&](double v) { return top + plot_h - (v - ylo) / (yhi - ylo) * plot_h; };

  using detail::fixed2;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"#ffffff\"/>\n";
  if (!caption.empty())
    s << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << detail::xml_escape(caption) << "</text>\n";
  s << "<line x1=\"" << fixed2(left) << "\" y1=\"" << fixed2(top + plot_h) << "\" x2=\"" << fixed2(left + plot_w)
    << "\" y2=\"" << fixed2(top + plot_h) << "\" stroke=\"#000000\"/>\n";
  s << "<line x1=\"" << fixed2(left) << "\" y1=\"" << fixed2(top) << "\" x2=\"" << fixed2(left) << "\" y2=\""
    << fixed2(top + plot_h) << "\" stroke=\"#000000\"/>\n";
  // axis extremes
  s << "<text x=\"" << fixed2(left) << "\" y=\"" << fixed2(top + plot_h + 18)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << detail::short_num(xlo)
    << "</text>\n";
  s << "<text x=\"" << fixed2(left + plot_w) << "\" y=\"" << fixed2(top + plot_h + 18)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << detail::short_num(xhi)
    << "</text>\n";
  s << "<text x=\"" << fixed2(left - 6) << "\" y=\"" << fixed2(top + plot_h)
    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << detail::short_num(ylo)
    << "</text>\n";
  s << "<text x=\"" << fixed2(left - 6) << "\" y=\"" << fixed2(top + 4)
    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << detail::short_num(yhi)
    << "</text>\n";
  s << "<text x=\"" << fixed2(left + plot_w / 2) << "\" y=\"" << fixed2(height - 20)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << detail::xml_escape(x_name)
    << "</text>\n";
  s << "<text x=\"20\" y=\"" << fixed2(top + plot_h / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"13\" transform=\"rotate(-90 20 " << fixed2(top + plot_h / 2) << ")\">"
    << detail::xml_escape(y_name) << "</text>\n";
  for (const auto& p : points) {
    s << "<circle cx=\"" << fixed2(px(p.x)) << "\" cy=\"" << fixed2(py(p.y))
      << "\" r=\"4\" fill=\"#cc0000\"><title>" << detail::xml_escape(p.label) << "</title></circle>\n";
  }
  s << "</svg>\n";
  return s.str();
}

/// Plain point dump: `label,<x_name>,<y_name>` header then one row per point.
inline std::string scatter_csv(std::span<const ScatterPoint> points, std::string_view x_name,
                               std::string_view y_name) {
  std::ostringstream s;
  s << "label," << detail::quote_if_needed(std::string(x_name)) << ','
    << detail::quote_if_needed(std::string(y_name)) << '\n';
  for (const auto& p : points)
    s << detail::quote_if_needed(p.label) << ',' << detail::format_real(p.x) << ',' << detail::format_real(p.y)
      << '\n';
  return s.str();
}

}  // namespace kmapper
