#include "zinf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "zinf/errors.hpp"
#include "zinf/svg.hpp"

namespace zinf {
namespace {

void check_rows(const FitResult& fit, const CountDataset& data) {
  const std::size_t n = data.size();
  if (fit.fitted_mu.size() != n || fit.fitted_pit0.size() != n || fit.fitted_pi0.size() != n ||
      fit.fitted_lambda.size() != n)
    throw Error(ErrorKind::Mismatch, "fit has " + std::to_string(fit.fitted_mu.size()) +
                                         " fitted rows but data has " + std::to_string(n));
}

}  // namespace

std::vector<CellFit> fitted_vs_observed(const FitResult& fit, const CountDataset& data,
                                        std::string_view cell_column) {
  check_rows(fit, data);
  const Column cells = categorical_view(data, cell_column);
  std::vector<CellFit> out(cells.levels.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k].cell = cells.levels[k];
  for (std::size_t i = 0; i < data.size(); ++i) {
    CellFit& c = out[cells.codes[i]];
    ++c.n;
    c.observed_mean += static_cast<double>(data.y[i]);
    c.observed_p0 += data.y[i] == 0 ? 1.0 : 0.0;
    c.fitted_mean += fit.fitted_mu[i];
    c.fitted_pit0 += fit.fitted_pit0[i];
    c.fitted_lambda += fit.fitted_lambda[i];
    c.fitted_pi0 += fit.fitted_pi0[i];
  }
  for (CellFit& c : out) {
    if (c.n == 0) continue;
    const double n = static_cast<double>(c.n);
    c.observed_mean /= n;
    c.observed_p0 /= n;
    c.fitted_mean /= n;
    c.fitted_pit0 /= n;
    c.fitted_lambda /= n;
    c.fitted_pi0 /= n;
  }
  return out;
}

std::string fitted_vs_observed_csv(const std::vector<CellFit>& rows) {
  std::ostringstream os;
  os << "cell,n,observed_mean,fitted_mean,observed_p0,fitted_pit0,fitted_lambda,fitted_pi0\n";
  for (const CellFit& c : rows)
    os << c.cell << ',' << c.n << ',' << format_number(c.observed_mean) << ',' << format_number(c.fitted_mean)
       << ',' << format_number(c.observed_p0) << ',' << format_number(c.fitted_pit0) << ','
       << format_number(c.fitted_lambda) << ',' << format_number(c.fitted_pi0) << '\n';
  return os.str();
}

std::vector<double> make_grid(const GridSpec& spec) {
  if (spec.points < 2) throw Error(ErrorKind::InvalidParameter, "grid needs at least 2 points");
  if (!(spec.eps > 0.0 && spec.eps < 0.5)) throw Error(ErrorKind::InvalidParameter, "grid eps must lie in (0, 0.5)");
  std::vector<double> grid(spec.points);
  const double span = 1.0 - 2.0 * spec.eps;
  const double last = static_cast<double>(spec.points - 1);
  for (std::size_t j = 0; j < spec.points; ++j) grid[j] = spec.eps + span * (static_cast<double>(j) / last);
  return grid;
}

CurveTable zero_curve(std::string label, CurveModel model, double param, const GridSpec& grid,
                      std::vector<std::pair<double, double>> points) {
  CurveTable t;
  t.label = std::move(label);
  t.grid = make_grid(grid);
  t.points = std::move(points);
  t.pit0.reserve(t.grid.size());
  for (double p : t.grid) {
    double v = p;
    if (const ZiType* zi = std::get_if<ZiType>(&model)) {
      if (*zi != ZiType::None) v = zi_zero_prob(*zi, p, param);
    } else {
      const Family fam = std::get<Family>(model);
      if (fam != Family::Poisson) v = implicit_zi_curve(fam, p, param);
    }
    t.pit0.push_back(v);
  }
  return t;
}

std::vector<std::pair<double, double>> overlay_points(const FitResult& fit, const CountDataset& data,
                                                      std::string_view cell_column) {
  std::vector<std::pair<double, double>> pts;
  for (const CellFit& c : fitted_vs_observed(fit, data, cell_column))
    if (c.n > 0) pts.emplace_back(std::exp(-c.fitted_lambda), c.observed_p0);
  return pts;
}

std::string curve_csv(const CurveTable& table) {
  std::ostringstream os;
  const bool with_points = !table.points.empty();
  os << "pi0,pit0";
  if (with_points) os << ",point_pi0,point_p0";
  os << '\n';
  const std::size_t rows = std::max(table.grid.size(), with_points ? table.points.size() : 0);
  for (std::size_t j = 0; j < rows; ++j) {
    if (j < table.grid.size()) os << format_number(table.grid[j]) << ',' << format_number(table.pit0[j]);
    else os << ',';
    if (with_points) {
      os << ',';
      if (j < table.points.size())
        os << format_number(table.points[j].first) << ',' << format_number(table.points[j].second);
      else os << ',';
    }
    os << '\n';
  }
  return os.str();
}

ZeroDiagnostic empirical_zero_diagnostic(const FitResult& fit, const CountDataset& data, std::size_t bins,
                                         ZeroScale scale) {
  check_rows(fit, data);
  if (bins < 2) throw Error(ErrorKind::InvalidParameter, "zero diagnostic needs at least 2 bins");
  const std::size_t n = data.size();
  if (n / bins < 5)
    throw Error(ErrorKind::TooFewObservations, std::to_string(n) + " rows cannot fill " + std::to_string(bins) +
                                                   " bins of at least 5");
  const std::vector<double>& prob = scale == ZeroScale::Base ? fit.fitted_pi0 : fit.fitted_pit0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return prob[a] < prob[b]; });

  ZeroDiagnostic out;
  out.scale = scale;
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t first = b * n / bins;
    const std::size_t last = (b + 1) * n / bins;
    ZeroBin bin;
    bin.n = last - first;
    bin.lo = prob[order[first]];
    bin.hi = prob[order[last - 1]];
    double var = 0.0;
    for (std::size_t r = first; r < last; ++r) {
      const std::size_t i = order[r];
      bin.midpoint += prob[i];
      bin.observed += data.y[i] == 0 ? 1.0 : 0.0;
      var += prob[i] * (1.0 - prob[i]);
    }
    const double m = static_cast<double>(bin.n);
    bin.midpoint /= m;
    bin.observed /= m;
    bin.sd = std::sqrt(var) / m;
    const double dev = bin.observed - bin.midpoint;
    if (bin.sd > 0.0) bin.z = dev / bin.sd;
    else bin.z = dev == 0.0 ? 0.0 : std::copysign(HUGE_VAL, dev);
    out.max_abs_deviation = std::max(out.max_abs_deviation, std::abs(dev));
    out.max_abs_z = std::max(out.max_abs_z, std::abs(bin.z));
    out.bins.push_back(bin);
  }
  return out;
}

std::string zero_diagnostic_csv(const ZeroDiagnostic& diag) {
  std::ostringstream os;
  os << "bin,n,lo,hi,midpoint,observed,sd,z\n";
  for (std::size_t b = 0; b < diag.bins.size(); ++b) {
    const ZeroBin& z = diag.bins[b];
    os << b << ',' << z.n << ',' << format_number(z.lo) << ',' << format_number(z.hi) << ','
       << format_number(z.midpoint) << ',' << format_number(z.observed) << ',' << format_number(z.sd) << ','
       << format_number(z.z) << '\n';
  }
  return os.str();
}

std::vector<AicRow> aic_table(std::span<const FitResult> fits, std::span<const std::string> labels) {
  if (!labels.empty() && labels.size() != fits.size())
    throw Error(ErrorKind::DimensionMismatch, "aic_table: labels and fits differ in length");
  std::vector<AicRow> rows;
  rows.reserve(fits.size());
  for (std::size_t i = 0; i < fits.size(); ++i) {
    const FitResult& f = fits[i];
    rows.push_back({labels.empty() ? model_label(f.spec) : labels[i], static_cast<std::size_t>(f.params.size()),
                    f.loglik_value, f.aic, 0.0, f.converged});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const AicRow& a, const AicRow& b) { return a.aic < b.aic; });
  if (!rows.empty())
    for (AicRow& r : rows) r.delta_aic = r.aic - rows.front().aic;
  return rows;
}

std::string aic_csv(const std::vector<AicRow>& rows) {
  std::ostringstream os;
  os << "model,n_params,loglik,aic,delta_aic,converged\n";
  for (const AicRow& r : rows)
    os << r.label << ',' << r.n_params << ',' << format_number(r.loglik) << ',' << format_number(r.aic) << ','
       << format_number(r.delta_aic) << ',' << (r.converged ? "true" : "false") << '\n';
  return os.str();
}

std::string curves_svg(std::string_view title, std::span<const CurveTable> curves, bool single_panel) {
  std::vector<svg::Panel> panels;
  const auto make_panel = [](std::string t) {
    svg::Panel p;
    p.title = std::move(t);
    p.x_label = "pi0";
    p.y_label = "altered pi0";
    p.identity_line = true;
    return p;
  };
  const auto points_series = [](const CurveTable& c) {
    svg::Series s;
    s.line = false;
    for (const auto& [x, y] : c.points) {
      s.x.push_back(x);
      s.y.push_back(y);
    }
    return s;
  };
  if (single_panel) {
    svg::Panel p = make_panel("");
    for (const CurveTable& c : curves) p.series.push_back({c.label, c.grid, c.pit0, true, false});
    for (const CurveTable& c : curves)
      if (!c.points.empty()) p.series.push_back(points_series(c));
    panels.push_back(std::move(p));
    return svg::render(title, panels, 1);
  }
  for (const CurveTable& c : curves) {
    svg::Panel p = make_panel(c.label);
    p.series.push_back({"", c.grid, c.pit0, true, false});
    if (!c.points.empty()) p.series.push_back(points_series(c));
    panels.push_back(std::move(p));
  }
  return svg::render(title, panels, 2);
}

std::string fitted_vs_observed_svg(std::string_view title, std::span<const ModelCells> models) {
  svg::Panel zeros;
  zeros.title = "proportion of zeros";
  zeros.x_label = "observed";
  zeros.y_label = "fitted";
  zeros.identity_line = true;
  svg::Panel means = zeros;
  means.title = "mean";
  double top = 1.0;
  for (const ModelCells& m : models)
    for (const CellFit& c : m.cells) top = std::max({top, c.observed_mean, c.fitted_mean});
  means.x_max = means.y_max = std::ceil(top);
  for (const ModelCells& m : models) {
    svg::Series z{m.label, {}, {}, false, false};
    svg::Series mu{m.label, {}, {}, false, false};
    for (const CellFit& c : m.cells) {
      z.x.push_back(c.observed_p0);
      z.y.push_back(c.fitted_pit0);
      mu.x.push_back(c.observed_mean);
      mu.y.push_back(c.fitted_mean);
    }
    zeros.series.push_back(std::move(z));
    means.series.push_back(std::move(mu));
  }
  return svg::render(title, {zeros, means}, 2);
}

}  // namespace zinf
