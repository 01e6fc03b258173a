#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace eitqhe::analysis::svg {

enum class Style { Line, Points, Bars };

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
  Style style = Style::Line;
  bool log_x = false;
};

inline void write(std::ostream& os, const Plot& p) {
  constexpr double w = 640, h = 420, ml = 80, mr = 20, mt = 40, mb = 60;
  auto tx = [&](double v) { return p.log_x ? std::log10(v) : v; };
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!p.x.empty()) {
    const auto [xa, xb] = std::minmax_element(p.x.begin(), p.x.end());
    const auto [ya, yb] = std::minmax_element(p.y.begin(), p.y.end());
    x0 = tx(*xa);
    x1 = tx(*xb);
    y0 = std::min(0.0, *ya);
    y1 = *yb;
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto sx = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * (w - ml - mr); };
  auto sy = [&](double v) { return h - mb - (v - y0) / (y1 - y0) * (h - mt - mb); };

  os << fmt::format(R"svg(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">)svg",
                    w, h)
     << '\n';
  os << fmt::format(R"svg(<rect width="{}" height="{}" fill="white"/>)svg", w, h) << '\n';
  os << fmt::format(R"svg(<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>)svg", w / 2, p.title) << '\n';
  os << fmt::format(R"svg(<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black"/>)svg", ml, h - mb, w - mr) << '\n';
  os << fmt::format(R"svg(<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/>)svg", ml, h - mb, mt) << '\n';
  os << fmt::format(R"svg(<text x="{}" y="{}" text-anchor="middle">{}</text>)svg", (ml + w - mr) / 2, h - 15, p.x_label) << '\n';
  os << fmt::format(R"svg(<text x="15" y="{0}" text-anchor="middle" transform="rotate(-90 15 {0})">{1}</text>)svg",
                    (mt + h - mb) / 2, p.y_label)
     << '\n';
  os << fmt::format(R"svg(<text x="{}" y="{}" text-anchor="start">{:.4g}</text>)svg", ml, h - mb + 18, p.log_x ? std::pow(10, x0) : x0) << '\n';
  os << fmt::format(R"svg(<text x="{}" y="{}" text-anchor="end">{:.4g}</text>)svg", w - mr, h - mb + 18, p.log_x ? std::pow(10, x1) : x1) << '\n';
  os << fmt::format(R"svg(<text x="{}" y="{}" text-anchor="end">{:.4g}</text>)svg", ml - 5, h - mb, y0) << '\n';
  os << fmt::format(R"svg(<text x="{}" y="{}" text-anchor="end">{:.4g}</text>)svg", ml - 5, mt + 4, y1) << '\n';

  switch (p.style) {
    case Style::Line: {
      os << R"svg(<polyline fill="none" stroke="steelblue" stroke-width="2" points=")svg";
      for (std::size_t i = 0; i < p.x.size(); ++i) os << fmt::format("{}{:.2f},{:.2f}", i ? " " : "", sx(p.x[i]), sy(p.y[i]));
      os << "\"/>\n";
      break;
    }
    case Style::Points:
      for (std::size_t i = 0; i < p.x.size(); ++i) {
        os << fmt::format(R"svg(<circle cx="{:.2f}" cy="{:.2f}" r="2" fill="steelblue" fill-opacity="0.4"/>)svg", sx(p.x[i]),
                          sy(p.y[i]))
           << '\n';
      }
      break;
    case Style::Bars: {
      const double bw = p.x.size() > 1 ? 0.8 * (w - ml - mr) / static_cast<double>(p.x.size()) : 20.0;
      for (std::size_t i = 0; i < p.x.size(); ++i) {
        const double top = sy(p.y[i]);
        os << fmt::format(R"svg(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="steelblue"/>)svg",
                          sx(p.x[i]) - bw / 2, top, bw, sy(y0) - top)
           << '\n';
      }
      break;
    }
  }
  os << "</svg>\n";
}

}  // namespace eitqhe::analysis::svg
