#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "test_support.hpp"
#include "zinf/diagnostics.hpp"
#include "zinf/errors.hpp"
#include "zinf/simulate.hpp"
#include "zinf/svg.hpp"

using namespace zinf;

namespace {

ModelSpec saturated(Family f, ZiType z) {
  ModelSpec s;
  s.base = f;
  s.zi = z;
  s.mean_design = DesignSpec::saturated(kTrajanCell);
  return s;
}

const CountDataset& trajan() {
  static const CountDataset d = trajan_dataset();
  return d;
}

const FitResult& trajan_fit(Family f, ZiType z) {
  static std::map<std::pair<int, int>, FitResult> cache;
  const auto key = std::make_pair(static_cast<int>(f), static_cast<int>(z));
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, fit_mle(saturated(f, z), trajan())).first;
  return it->second;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(FittedVsObserved, PoissonMatchesCellMeans) {
  const auto rows = fitted_vs_observed(trajan_fit(Family::Poisson, ZiType::None), trajan(), kTrajanCell);
  ASSERT_EQ(rows.size(), 8u);
  std::size_t total = 0;
  for (const CellFit& r : rows) {
    EXPECT_NEAR(r.fitted_mean, r.observed_mean, 1e-8) << r.cell;
    EXPECT_NEAR(r.fitted_pi0, std::exp(-r.fitted_lambda), 1e-15);
    total += r.n;
  }
  EXPECT_EQ(total, trajan().size());
}

TEST(FittedVsObserved, TypeAHurdleStructure) {
  const auto rows = fitted_vs_observed(trajan_fit(Family::Poisson, ZiType::A), trajan(), kTrajanCell);
  const CellSummaryTable t = cell_summaries(trajan(), kTrajanCell);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_NEAR(rows[k].fitted_pit0, rows[0].fitted_pit0, 1e-12);
    EXPECT_NEAR(rows[k].fitted_mean, (1 - rows[k].fitted_pit0) * t.cells[k].trunc_mean, 1e-5);
  }
  EXPECT_NEAR(rows[0].fitted_pit0, t.overall_p0, 1e-5);
}

TEST(FittedVsObserved, RowCountMismatch) {
  const CountDataset other = test::iid({1, 2, 3});
  try {
    fitted_vs_observed(trajan_fit(Family::Poisson, ZiType::None), other, kTrajanCell);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Mismatch);
  }
}

TEST(FittedVsObserved, CsvShape) {
  const auto rows = fitted_vs_observed(trajan_fit(Family::Poisson, ZiType::D), trajan(), kTrajanCell);
  const auto l = lines(fitted_vs_observed_csv(rows));
  ASSERT_EQ(l.size(), 9u);
  EXPECT_EQ(l[0], "cell,n,observed_mean,fitted_mean,observed_p0,fitted_pit0,fitted_lambda,fitted_pi0");
  EXPECT_EQ(l[1].substr(0, l[1].find(',')), rows[0].cell);
}

TEST(ZeroCurve, Grid) {
  const auto g = make_grid({5, 0.1});
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g.front(), 0.1);
  EXPECT_DOUBLE_EQ(g.back(), 0.9);
  EXPECT_NEAR(g[2], 0.5, 1e-15);
  EXPECT_THROW(make_grid({1, 0.1}), Error);
  EXPECT_THROW(make_grid({10, 0.5}), Error);
}

TEST(ZeroCurve, TypeAIsHorizontal) {
  const CurveTable c = zero_curve("A", ZiType::A, std::log(0.4 / 0.6));
  ASSERT_EQ(c.grid.size(), 512u);
  for (double v : c.pit0) EXPECT_NEAR(v, 0.4, 1e-12);
}

TEST(ZeroCurve, IdentityForNoInflation) {
  for (CurveModel m : {CurveModel{ZiType::None}, CurveModel{Family::Poisson}}) {
    const CurveTable c = zero_curve("id", m, 0.7, {64, 1e-3});
    for (std::size_t i = 0; i < c.grid.size(); ++i) EXPECT_EQ(c.pit0[i], c.grid[i]);
  }
}

TEST(ZeroCurve, NbQuadThroughPoint) {
  const double phi = match_dispersion_through_point(Family::NBquad, 0.2, 0.4);
  const CurveTable c = zero_curve("nbq", Family::NBquad, phi, {5, 0.2});
  EXPECT_NEAR(c.pit0[0], 0.4, 1e-9);
  // pi0 = 0.2 means lambda = log 5
  EXPECT_NEAR(c.pit0[0], std::pow(1 + phi * std::log(5.0), -1 / phi), 1e-12);
}

TEST(ZeroCurve, AllCurvesThroughCommonPoint) {
  const double x = 0.2, y = 0.4;
  std::vector<CurveTable> curves;
  for (ZiType z : {ZiType::A, ZiType::B, ZiType::C, ZiType::D})
    curves.push_back(zero_curve(std::string(to_string(z)), z, zi_gamma_from_point(z, x, y), {5, 0.2}));
  for (Family f : {Family::NBlin, Family::NBquad})
    curves.push_back(zero_curve(std::string(to_string(f)), f, match_dispersion_through_point(f, x, y), {5, 0.2}));
  for (const CurveTable& c : curves) EXPECT_NEAR(c.pit0[0], y, 1e-3) << c.label;
}

TEST(ZeroCurve, MonotoneAndAboveIdentityProperty) {
  test::Gen g(21);
  for (int trial = 0; trial < 200; ++trial) {
    CurveModel m;
    double param;
    switch (g.integer(0, 4)) {
      case 0: m = ZiType::B; param = g.uniform(-4, 0); break;
      case 1: m = ZiType::C; param = std::log(g.uniform(0.01, 0.99)); break;
      case 2: m = ZiType::D; param = g.uniform(0, 5); break;
      case 3: m = Family::NBquad; param = g.log_uniform(1e-3, 50); break;
      default: m = Family::NBlin; param = g.log_uniform(1e-3, 50); break;
    }
    const CurveTable c = zero_curve("p", m, param, {200, 1e-4});
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      ASSERT_GE(c.pit0[i], c.grid[i] - 1e-12) << trial;
      if (i > 0) {
        ASSERT_GE(c.pit0[i], c.pit0[i - 1] - 1e-12) << trial;
      }
    }
  }
}

TEST(ZeroCurve, CsvWithPoints) {
  const CurveTable c = zero_curve("B", ZiType::B, -0.5, {4, 0.1}, {{0.3, 0.5}});
  const auto l = lines(curve_csv(c));
  ASSERT_EQ(l.size(), 5u);
  EXPECT_EQ(l[0], "pi0,pit0,point_pi0,point_p0");
  EXPECT_EQ(l[1].substr(l[1].size() - 8), ",0.3,0.5");
  EXPECT_EQ(l[2].substr(l[2].size() - 2), ",,");
  EXPECT_EQ(lines(curve_csv(zero_curve("A", ZiType::A, 0.0, {4, 0.1})))[0], "pi0,pit0");
}

TEST(ZeroCurve, OverlayPoints) {
  const auto pts = overlay_points(trajan_fit(Family::Poisson, ZiType::None), trajan(), kTrajanCell);
  const CellSummaryTable t = cell_summaries(trajan(), kTrajanCell);
  ASSERT_EQ(pts.size(), 8u);
  for (std::size_t k = 0; k < 8; ++k) {
    EXPECT_NEAR(pts[k].first, std::exp(-t.cells[k].mean), 1e-9);
    EXPECT_NEAR(pts[k].second, t.cells[k].zero_prop, 1e-15);
  }
}

TEST(ZeroDiagnostic, WellSpecifiedModelWithinNoise) {
  SimPlan p;
  p.spec.zi = ZiType::D;
  p.spec.mean_design.numerics = {"x"};
  CountDataset cov;
  std::vector<double> x(400);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i) / 400.0;
  cov.add_numeric("x", x);
  p.covariates = cov;
  p.true_params = Eigen::Vector3d(-0.5, 2.0, 0.7);
  p.n = 4000;
  p.seed = 8;
  const CountDataset d = simulate(p);
  const FitResult f = fit_mle(p.spec, d);
  const ZeroDiagnostic z = empirical_zero_diagnostic(f, d, 10);
  ASSERT_EQ(z.bins.size(), 10u);
  EXPECT_LT(z.max_abs_z, 3.5);
  for (const ZeroBin& b : z.bins) {
    EXPECT_EQ(b.n, 400u);
    EXPECT_LE(b.lo, b.midpoint);
    EXPECT_LE(b.midpoint, b.hi);
    EXPECT_NEAR(b.z, (b.observed - b.midpoint) / b.sd, 1e-12);
  }
  for (std::size_t k = 1; k < z.bins.size(); ++k) EXPECT_LE(z.bins[k - 1].hi, z.bins[k].lo);
}

TEST(ZeroDiagnostic, PoissonMissesTrajanZeros) {
  const ZeroDiagnostic z = empirical_zero_diagnostic(trajan_fit(Family::Poisson, ZiType::None), trajan(), 4, ZeroScale::Base);
  EXPECT_GT(z.max_abs_z, 3.0);
  EXPECT_GT(z.max_abs_deviation, 0.1);
  const ZeroDiagnostic d = empirical_zero_diagnostic(trajan_fit(Family::Poisson, ZiType::D), trajan(), 4);
  EXPECT_LT(d.max_abs_z, z.max_abs_z);
}

TEST(ZeroDiagnostic, Errors) {
  const FitResult& f = trajan_fit(Family::Poisson, ZiType::None);
  try {
    empirical_zero_diagnostic(f, trajan(), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidParameter);
  }
  try {
    empirical_zero_diagnostic(f, trajan(), 60);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooFewObservations);
  }
}

TEST(ZeroDiagnostic, Csv) {
  const ZeroDiagnostic z = empirical_zero_diagnostic(trajan_fit(Family::Poisson, ZiType::None), trajan(), 3);
  const auto l = lines(zero_diagnostic_csv(z));
  ASSERT_EQ(l.size(), 4u);
  EXPECT_EQ(l[0], "bin,n,lo,hi,midpoint,observed,sd,z");
}

TEST(AicTable, SingleAndOrdering) {
  const FitResult& p = trajan_fit(Family::Poisson, ZiType::None);
  const auto one = aic_table(std::span<const FitResult>(&p, 1));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].delta_aic, 0.0);
  EXPECT_EQ(one[0].n_params, 8u);
  EXPECT_EQ(one[0].label, model_label(p.spec));

  const std::vector<FitResult> fits = {p, trajan_fit(Family::Poisson, ZiType::D), p};
  const std::vector<std::string> labels = {"first", "d", "second"};
  const auto rows = aic_table(fits, labels);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].label, "d");
  EXPECT_EQ(rows[1].label, "first");
  EXPECT_EQ(rows[2].label, "second");
  EXPECT_DOUBLE_EQ(rows[1].delta_aic, p.aic - rows[0].aic);
  const std::vector<std::string> short_labels = {"x"};
  EXPECT_THROW(aic_table(fits, short_labels), Error);
  EXPECT_EQ(lines(aic_csv(rows))[0], "model,n_params,loglik,aic,delta_aic,converged");
}

TEST(AicTable, TypeDPreferredOnInflatedData) {
  SimPlan plan;
  plan.spec.zi = ZiType::D;
  plan.true_params = Eigen::Vector2d(std::log(3.0), 1.2);
  plan.n = 2000;
  plan.seed = 17;
  const CountDataset d = simulate(plan);
  ModelSpec none;
  const std::vector<FitResult> fits = {fit_mle(none, d), fit_mle(plan.spec, d)};
  const auto rows = aic_table(fits);
  EXPECT_EQ(rows[0].label, model_label(plan.spec));
  EXPECT_GT(rows[1].delta_aic, 10.0);
}

TEST(Svg, EscapeAndStructure) {
  EXPECT_EQ(svg::escape("a<b & \"c\">"), "a&lt;b &amp; &quot;c&quot;&gt;");
  svg::Panel p;
  p.title = "t";
  p.series.push_back({"s", {0.0, 1.0}, {0.0, 1.0}});
  const std::string s = svg::render("x", {p, p, p}, 2);
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
  EXPECT_EQ(s, svg::render("x", {p, p, p}, 2));
}

TEST(Svg, GoldenCurvesFigure) {
  std::vector<CurveTable> curves;
  curves.push_back(zero_curve("Type B", ZiType::B, -0.5, {9, 0.1}, {{0.3, 0.5}, {0.6, 0.7}}));
  curves.push_back(zero_curve("NB-quad", Family::NBquad, 1.0, {9, 0.1}));
  const std::string got = curves_svg("golden", curves, true);
  const std::string path = test::asset("curves_golden.svg");
  if (const char* update = std::getenv("ZINF_UPDATE_GOLDEN"); update && std::string(update) == "1") {
    std::ofstream(path, std::ios::binary) << got;
  }
  EXPECT_EQ(got, test::slurp(path));
  const std::string panels = curves_svg("golden", curves, false);
  EXPECT_NE(panels, got);
  EXPECT_NE(panels.find("Type B"), std::string::npos);
}

TEST(Svg, FittedVsObservedFigure) {
  const std::vector<ModelCells> models = {
      {"poisson", fitted_vs_observed(trajan_fit(Family::Poisson, ZiType::None), trajan(), kTrajanCell)},
      {"D", fitted_vs_observed(trajan_fit(Family::Poisson, ZiType::D), trajan(), kTrajanCell)}};
  const std::string s = fitted_vs_observed_svg("trajan", models);
  EXPECT_NE(s.find("poisson"), std::string::npos);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n') > 10, true);
}
