#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "test_support.hpp"
#include "zinf/errors.hpp"
#include "zinf/fit.hpp"
#include "zinf/simulate.hpp"

using namespace zinf;

namespace {

ModelSpec spec(Family f, ZiType z, DesignSpec mean = DesignSpec::constant()) {
  ModelSpec s;
  s.base = f;
  s.zi = z;
  s.mean_design = std::move(mean);
  return s;
}

ModelSpec saturated(Family f, ZiType z) { return spec(f, z, DesignSpec::saturated(kTrajanCell)); }

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double ybar(const CountDataset& d) {
  return std::accumulate(d.y.begin(), d.y.end(), 0.0) / static_cast<double>(d.size());
}
double p0(const CountDataset& d) {
  return static_cast<double>(std::count(d.y.begin(), d.y.end(), 0)) / static_cast<double>(d.size());
}

CountDataset sim_iid(ZiType z, double log_lambda, double gamma, std::size_t n, std::uint64_t seed) {
  SimPlan plan;
  plan.spec = spec(Family::Poisson, z);
  plan.true_params = Eigen::Vector2d(log_lambda, gamma);
  plan.n = n;
  plan.seed = seed;
  return simulate(plan);
}

// Truncated Poisson mean inverted by plain bisection.
double invert_truncated_mean(double m) {
  double lo = 1e-12, hi = 100.0;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mid / -std::expm1(-mid) < m ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(FitMle, IidTwoParameterTypesMatchSampleMoments) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const CountDataset d = sim_iid(ZiType::C, std::log(2.5), -0.6, 500, seed);
    for (ZiType z : {ZiType::A, ZiType::B, ZiType::C, ZiType::D}) {
      const FitResult f = fit_mle(spec(Family::Poisson, z), d);
      SCOPED_TRACE(std::string(to_string(z)) + " seed " + std::to_string(seed));
      EXPECT_NEAR(f.fitted_mu[0], ybar(d), 1e-6);
      EXPECT_NEAR(f.fitted_pit0[0], p0(d), 1e-6);
    }
  }
}

TEST(FitMle, TrajanPoissonReproducesCellMeans) {
  const CountDataset d = trajan_dataset();
  const FitResult f = fit_mle(saturated(Family::Poisson, ZiType::None), d);
  const CellSummaryTable t = cell_summaries(d, kTrajanCell);
  const Column cells = categorical_view(d, kTrajanCell);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(f.fitted_mu[i], t.cells[cells.codes[i]].mean, 1e-8);
}

TEST(FitMle, TrajanTypeAZeroProportion) {
  const FitResult f = fit_mle(saturated(Family::Poisson, ZiType::A), trajan_dataset());
  EXPECT_NEAR(mean_of(f.fitted_pit0), 0.237, 0.002);
}

TEST(FitMle, TrajanTypeDMeansAndZeros) {
  const CountDataset d = trajan_dataset();
  const FitResult f = fit_mle(saturated(Family::Poisson, ZiType::D), d);
  const CellSummaryTable t = cell_summaries(d, kTrajanCell);
  const Column cells = categorical_view(d, kTrajanCell);
  for (std::size_t i = 0; i < d.size(); ++i)
    EXPECT_NEAR(f.fitted_mu[i] / t.cells[cells.codes[i]].mean, 1.0, 1e-6);
  EXPECT_NEAR(mean_of(f.fitted_pit0), t.overall_p0, 1e-6);
}

TEST(FitMle, NbQuadReproducesMeansNbLinDoesNot) {
  const CountDataset d = trajan_dataset();
  const CellSummaryTable t = cell_summaries(d, kTrajanCell);
  const Column cells = categorical_view(d, kTrajanCell);
  const FitResult q = fit_mle(saturated(Family::NBquad, ZiType::None), d);
  const FitResult l = fit_mle(saturated(Family::NBlin, ZiType::None), d);
  double worst_q = 0.0, worst_l = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double m = t.cells[cells.codes[i]].mean;
    worst_q = std::max(worst_q, std::abs(q.fitted_mu[i] - m) / m);
    worst_l = std::max(worst_l, std::abs(l.fitted_mu[i] - m));
  }
  EXPECT_LT(worst_q, 1e-6);
  EXPECT_GT(worst_l, 1e-4);
  EXPECT_GT(q.phi(), 0.0);
}

TEST(FitMle, NestingAgainstNoInflation) {
  const CountDataset d = trajan_dataset();
  for (Family fam : {Family::Poisson, Family::NBquad}) {
    const double none = fit_mle(saturated(fam, ZiType::None), d).loglik_value;
    for (ZiType z : {ZiType::B, ZiType::C, ZiType::D})
      EXPECT_GE(fit_mle(saturated(fam, z), d).loglik_value, none - 1e-8) << to_string(fam) << to_string(z);
  }
}

TEST(FitMle, SaturatedGammaEquivalence) {
  const CountDataset d = trajan_dataset();
  std::vector<double> ll;
  for (ZiType z : {ZiType::A, ZiType::B, ZiType::C, ZiType::D}) {
    ModelSpec s = saturated(Family::Poisson, z);
    s.gamma_design = DesignSpec::saturated(kTrajanCell);
    s.type_c_deflation = z == ZiType::C;
    ll.push_back(fit_mle(s, d).loglik_value);
  }
  for (double v : ll) EXPECT_NEAR(v, ll[0], 1e-6);
}

TEST(FitMle, InvariantsOfTheResult) {
  const CountDataset d = trajan_dataset();
  for (ZiType z : {ZiType::A, ZiType::B, ZiType::C, ZiType::D}) {
    const FitResult f = fit_mle(saturated(Family::NBquad, z), d);
    EXPECT_DOUBLE_EQ(f.aic, 2.0 * static_cast<double>(f.params.size()) - 2.0 * f.loglik_value);
    for (std::size_t i = 0; i < d.size(); ++i)
      EXPECT_NEAR(f.fitted_mu[i], renormalizer(f.fitted_pi0[i], f.fitted_pit0[i]) * f.fitted_lambda[i],
                  1e-12 * f.fitted_mu[i]);
    EXPECT_GE(f.loglik_value, loglik(f.spec, d, default_start(f.spec, d)));
    EXPECT_EQ(f.param_names.size(), static_cast<std::size_t>(f.params.size()));
  }
}

TEST(FitMle, PermutedRowsGiveSameParameters) {
  const CountDataset d = trajan_dataset();
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  test::Gen g(4);
  std::shuffle(order.begin(), order.end(), g.engine());
  const CountDataset p = d.permuted(order);
  for (ZiType z : {ZiType::A, ZiType::B, ZiType::C, ZiType::D}) {
    const FitResult a = fit_mle(saturated(Family::Poisson, z), d);
    const FitResult b = fit_mle(saturated(Family::Poisson, z), p);
    EXPECT_LT((a.params - b.params).cwiseAbs().maxCoeff(), 1e-8) << to_string(z);
  }
}

TEST(FitMle, Deterministic) {
  const CountDataset d = trajan_dataset();
  const FitResult a = fit_mle(saturated(Family::NBlin, ZiType::None), d);
  const FitResult b = fit_mle(saturated(Family::NBlin, ZiType::None), d);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.loglik_value, b.loglik_value);
}

TEST(FitMle, AllZeroAndEmptyDataRejected) {
  for (const CountDataset& d : {test::iid({0, 0, 0}), test::iid({})}) {
    try {
      fit_mle(spec(Family::Poisson, ZiType::D), d);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::EmptyData);
    }
  }
}

TEST(FitMle, NonConvergenceCarriesBestPoint) {
  FitOptions o;
  o.max_iterations = 1;
  o.restarts = 1;
  try {
    fit_mle(saturated(Family::NBlin, ZiType::B), trajan_dataset(), o);
    FAIL();
  } catch (const NonConvergenceError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonConvergence);
    EXPECT_FALSE(e.best().converged);
    EXPECT_EQ(e.best().params.size(), 10);
    EXPECT_TRUE(std::isfinite(e.best().loglik_value));
  }
}

TEST(FitMle, SeparationWarningForAllZeroCell) {
  CountDataset d = test::iid({0, 0, 0, 1, 3, 0, 2});
  d.add_categorical("g", {"u", "u", "u", "v", "v", "v", "v"});
  FitOptions o;
  o.compute_vcov = false;
  try {
    const FitResult f = fit_mle(spec(Family::Poisson, ZiType::A, DesignSpec::saturated("g")), d, o);
    ASSERT_FALSE(f.warnings.empty());
    EXPECT_NE(f.warnings.front().find("separation"), std::string::npos);
  } catch (const NonConvergenceError& e) {
    ASSERT_FALSE(e.best().warnings.empty());
    EXPECT_NE(e.best().warnings.front().find("separation"), std::string::npos);
  }
}

TEST(FitMle, StartVectorLengthChecked) {
  FitOptions o;
  o.start = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(fit_mle(spec(Family::Poisson, ZiType::None), test::iid({1, 2}), o), Error);
}

TEST(TwoPart, TruncatedMeanInversion) {
  // 500 positives with truncated mean 1.582
  std::vector<std::int64_t> y(500, 1);
  for (int i = 0; i < 291; ++i) y[static_cast<std::size_t>(i)] = 2;
  y.insert(y.end(), 100, 0);
  CountDataset d = test::iid(y);
  d.add_categorical("g", std::vector<std::string>(y.size(), "only"));
  const FitResult f = fit_type_a_twopart(d, "g");
  const double lambda = std::exp(f.params[0]);
  EXPECT_NEAR(lambda, invert_truncated_mean(1.582), 1e-9);
  EXPECT_NEAR(lambda, 1.0, 1e-4);
  EXPECT_NEAR(f.params[1], std::log(100.0 / 500.0), 1e-12);
}

TEST(TwoPart, MatchesOptimizerOnTrajan) {
  const CountDataset d = trajan_dataset();
  const FitResult closed = fit_type_a_twopart(d, kTrajanCell);
  const FitResult opt = fit_mle(saturated(Family::Poisson, ZiType::A), d);
  EXPECT_NEAR(closed.loglik_value, opt.loglik_value, 1e-6);
  const CellSummaryTable t = cell_summaries(d, kTrajanCell);
  const Column cells = categorical_view(d, kTrajanCell);
  for (std::size_t i = 0; i < d.size(); ++i)
    EXPECT_NEAR(closed.fitted_mu[i], (1 - t.overall_p0) * t.cells[cells.codes[i]].trunc_mean, 1e-10);
}

TEST(TwoPart, DegenerateInputs) {
  CountDataset none_zero = test::iid({1, 2, 3, 4});
  none_zero.add_categorical("g", {"a", "a", "b", "b"});
  const FitResult f = fit_type_a_twopart(none_zero, "g");
  ASSERT_FALSE(f.warnings.empty());
  EXPECT_TRUE(std::isfinite(f.params[2]));
  EXPECT_LT(f.params[2], -20.0);

  CountDataset empty_cell = test::iid({0, 0, 3, 4});
  empty_cell.add_categorical("g", {"a", "a", "b", "b"});
  try {
    fit_type_a_twopart(empty_cell, "g");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyPositiveCell);
  }
}

TEST(Vcov, OneParameterShape) {
  const FitResult f = fit_mle(spec(Family::Poisson, ZiType::None), test::iid({0, 1, 3, 2, 2, 5}));
  ASSERT_TRUE(f.vcov.has_value());
  EXPECT_EQ(f.vcov->rows(), 1);
  EXPECT_GT((*f.vcov)(0, 0), 0.0);
  // var(log lambda-hat) = 1 / (n lambda)
  EXPECT_NEAR((*f.vcov)(0, 0), 1.0 / 13.0, 1e-5);
}

TEST(Vcov, IidPoissonMeanVarianceMonteCarlo) {
  const double mu = 3.0;
  const std::size_t n = 1000;
  std::vector<double> est;
  double model_var = 0.0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    SimPlan plan;
    plan.spec = spec(Family::Poisson, ZiType::None);
    plan.true_params = Eigen::VectorXd::Constant(1, std::log(mu));
    plan.n = n;
    plan.seed = seed;
    const FitResult f = fit_mle(plan.spec, simulate(plan));
    est.push_back(f.fitted_mu[0]);
    model_var += (*f.vcov)(0, 0) * f.fitted_mu[0] * f.fitted_mu[0];  // delta method
  }
  model_var /= static_cast<double>(est.size());
  const double m = mean_of(est);
  double v = 0.0;
  for (double e : est) v += (e - m) * (e - m);
  v /= static_cast<double>(est.size() - 1);
  EXPECT_NEAR(v / (mu / n), 1.0, 0.2);
  EXPECT_NEAR(model_var / (mu / n), 1.0, 0.2);
}

TEST(Vcov, TypeDMeanAndGammaOrthogonal) {
  // Natural (log lambda, gamma) estimates are correlated; the mixed pair
  // (mu, gamma) is orthogonal.
  const CountDataset d = sim_iid(ZiType::D, std::log(2.0), 1.0, 20000, 5);
  const FitResult f = fit_mle(spec(Family::Poisson, ZiType::D), d);
  ASSERT_TRUE(f.vcov.has_value());
  const Eigen::MatrixXd& v = *f.vcov;
  const double corr_natural = v(0, 1) / std::sqrt(v(0, 0) * v(1, 1));
  // d mu / d(log lambda, gamma) by central differences
  const auto mu_at = [&](double a, double b) {
    return zi_mean({{Family::Poisson, std::exp(a), 0.0}, ZiType::D, b});
  };
  const double h = 1e-6;
  Eigen::RowVector2d jmu((mu_at(f.params[0] + h, f.params[1]) - mu_at(f.params[0] - h, f.params[1])) / (2 * h),
                         (mu_at(f.params[0], f.params[1] + h) - mu_at(f.params[0], f.params[1] - h)) / (2 * h));
  Eigen::Matrix2d j;
  j << jmu, 0, 1;
  const Eigen::Matrix2d m = j * v * j.transpose();
  const double corr_mixed = m(0, 1) / std::sqrt(m(0, 0) * m(1, 1));
  EXPECT_GT(std::abs(corr_natural), 0.3);
  EXPECT_LT(std::abs(corr_mixed), 0.05);
}

TEST(Vcov, SymmetricPositiveDefiniteOnTrajan) {
  const FitResult f = fit_mle(saturated(Family::NBquad, ZiType::D), trajan_dataset());
  ASSERT_TRUE(f.vcov.has_value());
  EXPECT_LT((*f.vcov - f.vcov->transpose()).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*f.vcov);
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-6);
  EXPECT_EQ(f.standard_errors().size(), 10);
}

TEST(Vcov, SingularHessianIsReportedNotFatal) {
  // a mean column that is identically zero leaves its coefficient unidentified
  CountDataset d = test::iid({0, 1, 3, 2, 2, 5, 1, 0});
  d.add_numeric("z", std::vector<double>(8, 0.0));
  ModelSpec s = spec(Family::Poisson, ZiType::None);
  s.mean_design.numerics = {"z"};
  const FitResult f = fit_mle(s, d);
  EXPECT_FALSE(f.vcov.has_value());
  ASSERT_FALSE(f.warnings.empty());
  try {
    vcov_numeric(f, d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularHessian);
  }
}

TEST(DefaultStart, NeutralGammaAndHurdleShare) {
  const CountDataset d = trajan_dataset();
  EXPECT_NEAR(default_start(saturated(Family::Poisson, ZiType::A), d)[8], std::log(64.0 / 206.0), 1e-12);
  EXPECT_EQ(default_start(saturated(Family::Poisson, ZiType::D), d)[8], 0.0);
  EXPECT_EQ(default_start(saturated(Family::NBquad, ZiType::B), d)[9], std::log(0.5));
}
