#include "zinf/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace zinf::svg {
namespace {

constexpr double kPanelW = 360.0;
constexpr double kPanelH = 300.0;
constexpr double kMarginL = 56.0;
constexpr double kMarginR = 16.0;
constexpr double kMarginT = 34.0;
constexpr double kMarginB = 44.0;
constexpr double kTitleH = 30.0;

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                              "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
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

std::string render(std::string_view title, const std::vector<Panel>& panels, int columns) {
  columns = std::max(1, columns);
  const int n = static_cast<int>(panels.size());
  const int rows = std::max(1, (n + columns - 1) / columns);
  const int used_cols = std::min(columns, std::max(1, n));
  const double width = kPanelW * used_cols;
  const double height = kTitleH + kPanelH * rows;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\" font-family=\"sans-serif\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) + "\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(width / 2) + "\" y=\"20.00\" font-size=\"15\" text-anchor=\"middle\">" +
         escape(title) + "</text>\n";

  for (int p = 0; p < n; ++p) {
    const Panel& pn = panels[static_cast<std::size_t>(p)];
    const double ox = kPanelW * (p % columns);
    const double oy = kTitleH + kPanelH * (p / columns);
    const double x0 = ox + kMarginL;
    const double x1 = ox + kPanelW - kMarginR;
    const double y0 = oy + kPanelH - kMarginB;  // bottom
    const double y1 = oy + kMarginT;            // top
    const double xs = (pn.x_max > pn.x_min) ? (x1 - x0) / (pn.x_max - pn.x_min) : 1.0;
    const double ys = (pn.y_max > pn.y_min) ? (y0 - y1) / (pn.y_max - pn.y_min) : 1.0;
    const auto px = [&](double v) { return x0 + (std::clamp(v, pn.x_min, pn.x_max) - pn.x_min) * xs; };
    const auto py = [&](double v) { return y0 - (std::clamp(v, pn.y_min, pn.y_max) - pn.y_min) * ys; };

    out += "<g>\n";
    out += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(oy + 22) +
           "\" font-size=\"13\" text-anchor=\"middle\">" + escape(pn.title) + "</text>\n";
    out += "<rect x=\"" + num(x0) + "\" y=\"" + num(y1) + "\" width=\"" + num(x1 - x0) + "\" height=\"" +
           num(y0 - y1) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double fx = pn.x_min + (pn.x_max - pn.x_min) * t / 4.0;
      const double fy = pn.y_min + (pn.y_max - pn.y_min) * t / 4.0;
      out += "<text x=\"" + num(px(fx)) + "\" y=\"" + num(y0 + 14) + "\" font-size=\"10\" text-anchor=\"middle\">" +
             tick(fx) + "</text>\n";
      out += "<text x=\"" + num(x0 - 4) + "\" y=\"" + num(py(fy) + 3) + "\" font-size=\"10\" text-anchor=\"end\">" +
             tick(fy) + "</text>\n";
    }
    out += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(y0 + 32) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + escape(pn.x_label) + "</text>\n";
    out += "<text x=\"" + num(ox + 14) + "\" y=\"" + num((y0 + y1) / 2) +
           "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 " + num(ox + 14) + " " +
           num((y0 + y1) / 2) + ")\">" + escape(pn.y_label) + "</text>\n";
    if (pn.identity_line) {
      const double lo = std::max(pn.x_min, pn.y_min);
      const double hi = std::min(pn.x_max, pn.y_max);
      out += "<line x1=\"" + num(px(lo)) + "\" y1=\"" + num(py(lo)) + "\" x2=\"" + num(px(hi)) + "\" y2=\"" +
             num(py(hi)) + "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    }
    for (std::size_t s = 0; s < pn.series.size(); ++s) {
      const Series& se = pn.series[s];
      const char* color = kPalette[s % kPalette.size()];
      const std::size_t m = std::min(se.x.size(), se.y.size());
      if (se.line) {
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\"";
        if (se.dashed) out += " stroke-dasharray=\"6 3\"";
        out += " points=\"";
        for (std::size_t i = 0; i < m; ++i) {
          if (i) out.push_back(' ');
          out += num(px(se.x[i])) + "," + num(py(se.y[i]));
        }
        out += "\"/>\n";
      } else {
        for (std::size_t i = 0; i < m; ++i)
          out += "<circle cx=\"" + num(px(se.x[i])) + "\" cy=\"" + num(py(se.y[i])) + "\" r=\"3\" fill=\"" +
                 color + "\"/>\n";
      }
      if (!se.label.empty()) {
        const double ly = y1 + 14 + 13.0 * static_cast<double>(s);
        out += "<text x=\"" + num(x0 + 8) + "\" y=\"" + num(ly) + "\" font-size=\"10\" fill=\"" + color + "\">" +
               escape(se.label) + "</text>\n";
      }
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace zinf::svg
