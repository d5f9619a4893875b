#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace zinf::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool line = true;  // polyline when true, markers otherwise
  bool dashed = false;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  bool identity_line = false;
  std::vector<Series> series;
};

/// Grid of panels, `columns` per row. Output depends only on the inputs;
/// coordinates are written with two decimals.
std::string render(std::string_view title, const std::vector<Panel>& panels, int columns = 1);

std::string escape(std::string_view text);

}  // namespace zinf::svg
