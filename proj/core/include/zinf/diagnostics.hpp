#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "zinf/dataset.hpp"
#include "zinf/fit.hpp"

namespace zinf {

// ---- fitted versus observed, per cell ----

struct CellFit {
  std::string cell;
  std::size_t n = 0;
  double observed_mean = 0.0;
  double fitted_mean = 0.0;   // average mu-hat over the cell rows
  double observed_p0 = 0.0;
  double fitted_pit0 = 0.0;   // average altered zero probability
  double fitted_lambda = 0.0; // average base mean
  double fitted_pi0 = 0.0;    // average base zero probability
};

std::vector<CellFit> fitted_vs_observed(const FitResult& fit, const CountDataset& data,
                                        std::string_view cell_column);
std::string fitted_vs_observed_csv(const std::vector<CellFit>& rows);

// ---- zero-probability curves ----

using CurveModel = std::variant<ZiType, Family>;

struct GridSpec {
  std::size_t points = 512;
  double eps = 1e-4;
};

/// Evenly spaced grid on [eps, 1 - eps].
std::vector<double> make_grid(const GridSpec& spec);

struct CurveTable {
  std::string label;
  std::vector<double> grid;
  std::vector<double> pit0;
  std::vector<std::pair<double, double>> points;  // (pi0, observed p0) overlay
};

/// ZiType curves use zi_zero_prob with gamma = param; Family curves use the
/// implicit NB curve with phi = param. ZiType::None and Family::Poisson give
/// the identity.
CurveTable zero_curve(std::string label, CurveModel model, double param, const GridSpec& grid = {},
                      std::vector<std::pair<double, double>> points = {});

/// Per-cell overlay points (exp(-lambda-hat), observed p0) under the fit's
/// own base means.
std::vector<std::pair<double, double>> overlay_points(const FitResult& fit, const CountDataset& data,
                                                      std::string_view cell_column);

/// Columns pi0,pit0 and, when the table has points, point_pi0,point_p0
/// (left blank past the last point).
std::string curve_csv(const CurveTable& table);

// ---- empirical zero diagnostic ----

enum class ZeroScale { Base, Altered };

struct ZeroBin {
  std::size_t n = 0;
  double lo = 0.0;         // smallest fitted probability in the bin
  double hi = 0.0;         // largest
  double midpoint = 0.0;   // average fitted probability
  double observed = 0.0;   // fraction of zeros
  double sd = 0.0;         // binomial sd of the observed fraction
  double z = 0.0;
};

struct ZeroDiagnostic {
  ZeroScale scale = ZeroScale::Altered;
  std::vector<ZeroBin> bins;
  double max_abs_deviation = 0.0;
  double max_abs_z = 0.0;
};

/// Observations sorted by fitted zero probability and split into equal-count
/// bins; each bin compares the observed zero fraction with the average
/// fitted probability.
ZeroDiagnostic empirical_zero_diagnostic(const FitResult& fit, const CountDataset& data, std::size_t bins,
                                         ZeroScale scale = ZeroScale::Altered);
std::string zero_diagnostic_csv(const ZeroDiagnostic& diag);

// ---- AIC comparison ----

struct AicRow {
  std::string label;
  std::size_t n_params = 0;
  double loglik = 0.0;
  double aic = 0.0;
  double delta_aic = 0.0;
  bool converged = true;
};

/// Rows sorted by AIC (stable); labels default to model_label(spec).
std::vector<AicRow> aic_table(std::span<const FitResult> fits, std::span<const std::string> labels = {});
std::string aic_csv(const std::vector<AicRow>& rows);

// ---- figures ----

/// All curves on one panel, or one panel per curve with its overlay points.
std::string curves_svg(std::string_view title, std::span<const CurveTable> curves, bool single_panel);

struct ModelCells {
  std::string label;
  std::vector<CellFit> cells;
};

/// Two panels: fitted against observed zero proportion, and means.
std::string fitted_vs_observed_svg(std::string_view title, std::span<const ModelCells> models);

}  // namespace zinf
