#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "zinf/dataset.hpp"

namespace zinf {

/// Linear-predictor description. Factors are treatment-coded against their
/// first level when an intercept is present; without an intercept the first
/// factor gets one indicator per level (cell-means coding).
struct DesignSpec {
  bool intercept = true;
  std::vector<std::string> factors;
  std::vector<std::string> numerics;

  static DesignSpec constant() { return {}; }
  static DesignSpec saturated(std::string_view factor) { return {false, {std::string(factor)}, {}}; }

  bool operator==(const DesignSpec&) const = default;
};

struct DesignMatrix {
  Eigen::MatrixXd x;
  std::vector<std::string> names;
};

DesignMatrix build_design(const DesignSpec& spec, const CountDataset& data);

/// Compact text form, e.g. "1 + photoperiod:bap + num(dose)" or "0 + cell";
/// bare names are factors, num(x) marks a numeric column.
std::string to_string(const DesignSpec& spec);
/// Parses the to_string form; "1" is intercept only, "0 + f" drops it.
DesignSpec parse_design(const std::string& text);

}  // namespace zinf
