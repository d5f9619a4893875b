#include "zinf/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "zinf/optimizer.hpp"

namespace zinf {
namespace {

double logit(double p) { return std::log(p) - std::log1p(-p); }

// Coefficients making a design's linear predictor equal `value` everywhere,
// when the design can express a constant.
void set_constant(Eigen::Ref<Eigen::VectorXd> coef, const DesignSpec& design, std::size_t first_factor_levels,
                  double value) {
  coef.setZero();
  if (coef.size() == 0) return;
  if (design.intercept) {
    coef[0] = value;
  } else if (!design.factors.empty()) {
    for (std::size_t j = 0; j < first_factor_levels && static_cast<Eigen::Index>(j) < coef.size(); ++j)
      coef[static_cast<Eigen::Index>(j)] = value;
  }
}

std::size_t first_factor_levels(const DesignSpec& design, const CountDataset& data) {
  if (design.intercept || design.factors.empty()) return 0;
  return categorical_view(data, design.factors.front()).levels.size();
}

bool lexicographically_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

std::vector<std::string> separation_warnings(const ModelSpec& spec, const CountDataset& data) {
  std::vector<std::string> out;
  if (spec.zi != ZiType::A) return out;
  for (const auto& f : spec.mean_design.factors) {
    const Column c = categorical_view(data, f);
    std::vector<bool> positive(c.levels.size(), false);
    for (std::size_t i = 0; i < data.size(); ++i)
      if (data.y[i] > 0) positive[c.codes[i]] = true;
    for (std::size_t k = 0; k < c.levels.size(); ++k)
      if (!positive[k])
        out.push_back("separation: level '" + c.levels[k] + "' of '" + f +
                      "' has only zeros; its mean is not identified under type A");
  }
  return out;
}

// Uniform draw in (0,1) from the top 53 bits, independent of the standard
// library's distribution implementations.
double unit_uniform(std::mt19937_64& eng) {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double FitResult::phi() const {
  if (spec.base == Family::Poisson) return 0.0;
  if (spec.phi_mode == PhiMode::Fixed) return spec.phi_fixed;
  return std::exp(params[params.size() - 1]);
}

Eigen::VectorXd FitResult::standard_errors() const {
  if (!vcov) return {};
  return vcov->diagonal().cwiseMax(0.0).cwiseSqrt();
}

Eigen::VectorXd poisson_loglinear(const Eigen::MatrixXd& x, const std::vector<std::int64_t>& y) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  Eigen::VectorXd yv(n);
  for (Eigen::Index i = 0; i < n; ++i) yv[i] = static_cast<double>(y[static_cast<std::size_t>(i)]);
  // IRLS from mu = y + 0.1
  Eigen::VectorXd eta = (yv.array() + 0.1).log().matrix();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (int it = 0; it < 50; ++it) {
    const Eigen::VectorXd mu = eta.array().exp().matrix();
    const Eigen::VectorXd z = eta + ((yv - mu).array() / mu.array()).matrix();
    const Eigen::MatrixXd xtw = x.transpose() * mu.asDiagonal();
    Eigen::MatrixXd xtwx = xtw * x;
    xtwx.diagonal().array() += 1e-10;
    const Eigen::VectorXd next = xtwx.ldlt().solve(xtw * z);
    if (!next.allFinite()) break;
    const double change = (next - beta).cwiseAbs().maxCoeff();
    beta = next.cwiseMax(-30.0).cwiseMin(30.0);
    eta = x * beta;
    if (change < 1e-10) break;
  }
  return beta;
}

Eigen::VectorXd default_start(const ModelSpec& spec, const CountDataset& data) {
  const Likelihood lik(spec, data);
  const ParamLayout& lay = lik.layout();
  Eigen::VectorXd start = Eigen::VectorXd::Zero(lay.size());
  start.head(lay.n_mean) = poisson_loglinear(lik.mean_design().x, data.y);
  if (lay.n_gamma > 0) {
    double g0 = 0.0;
    if (spec.zi == ZiType::A) {
      const auto zeros = static_cast<double>(std::count(data.y.begin(), data.y.end(), 0));
      const double n = static_cast<double>(data.size());
      g0 = logit(std::clamp(zeros / n, 1.0 / (2.0 * n), 1.0 - 1.0 / (2.0 * n)));
    } else if (spec.zi == ZiType::C && !spec.type_c_deflation) {
      g0 = std::log(0.1);  // gamma = -0.1; gamma = 0 is not reachable in this parameterisation
    }
    set_constant(start.segment(lay.gamma_offset(), lay.n_gamma), spec.gamma_design,
                 first_factor_levels(spec.gamma_design, data), g0);
  }
  if (lay.has_log_phi) start[lay.phi_index()] = std::log(0.5);
  return start;
}

FitResult evaluate_fit(const ModelSpec& spec, const CountDataset& data, const Eigen::VectorXd& params) {
  const Likelihood lik(spec, data);
  FitResult r;
  r.spec = spec;
  r.params = params;
  r.param_names = lik.layout().names;
  r.loglik_value = lik.loglik(params);
  r.aic = 2.0 * static_cast<double>(params.size()) - 2.0 * r.loglik_value;
  for (const auto& o : lik.fitted(params)) {
    r.fitted_lambda.push_back(o.lambda);
    r.fitted_mu.push_back(o.mu);
    r.fitted_pi0.push_back(o.pi0);
    r.fitted_pit0.push_back(o.pit0);
  }
  return r;
}

FitResult fit_mle(const ModelSpec& spec, const CountDataset& data, const FitOptions& options) {
  if (data.empty()) throw Error(ErrorKind::EmptyData, "dataset has no observations");
  if (std::all_of(data.y.begin(), data.y.end(), [](std::int64_t v) { return v == 0; }))
    throw Error(ErrorKind::EmptyData, "all counts are zero: the mean is not identified");
  const Likelihood lik(spec, data);
  const ParamLayout& lay = lik.layout();

  Objective obj;
  obj.value = [&lik](const Eigen::VectorXd& p) { return -lik.loglik(p); };
  obj.gradient = [&lik](const Eigen::VectorXd& p) -> Eigen::VectorXd { return -lik.gradient(p); };

  OptimizerOptions oo;
  oo.max_iterations = options.max_iterations;
  oo.gradient_tol = options.gradient_tol;
  const double inf = std::numeric_limits<double>::infinity();
  oo.lower = Eigen::VectorXd::Constant(lay.size(), -inf);
  oo.upper = Eigen::VectorXd::Constant(lay.size(), inf);
  if (spec.zi == ZiType::C && !spec.type_c_deflation) {
    oo.lower.segment(lay.gamma_offset(), lay.n_gamma).setConstant(-40.0);
    oo.upper.segment(lay.gamma_offset(), lay.n_gamma).setConstant(10.0);
  }
  if (lay.has_log_phi) {
    oo.lower[lay.phi_index()] = std::log(1e-10);
    oo.upper[lay.phi_index()] = std::log(1e6);
  }

  Eigen::VectorXd start = options.start ? *options.start : default_start(spec, data);
  if (start.size() != lay.size())
    throw Error(ErrorKind::DimensionMismatch, "start vector has wrong length");

  OptimizerResult best = minimize_bfgs(obj, start, oo);
  int total_iterations = best.iterations;
  if (!best.converged) {
    std::mt19937_64 eng(options.seed);
    for (int r = 0; r < options.restarts; ++r) {
      Eigen::VectorXd jittered = start;
      for (Eigen::Index j = 0; j < jittered.size(); ++j)
        jittered[j] += (unit_uniform(eng) - 0.5) * std::fmax(1.0, std::fabs(start[j]));
      OptimizerResult trial = minimize_bfgs(obj, jittered, oo);
      total_iterations += trial.iterations;
      const bool better = (trial.converged && !best.converged) ||
                          (trial.converged == best.converged &&
                           (trial.value < best.value ||
                            (trial.value == best.value && lexicographically_less(trial.x, best.x))));
      if (better) best = std::move(trial);
      if (best.converged) break;
    }
  }

  FitResult result = evaluate_fit(spec, data, best.x);
  result.converged = best.converged;
  result.iterations = total_iterations;
  result.warnings = separation_warnings(spec, data);
  if (!best.converged)
    throw NonConvergenceError("optimiser did not converge for " + model_label(spec) + ": " + best.message,
                              std::move(result));
  if (options.compute_vcov) {
    try {
      result.vcov = vcov_numeric(result, data);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularHessian) throw;
      result.warnings.emplace_back(e.what());
    }
  }
  return result;
}

FitResult fit_type_a_twopart(const CountDataset& data, std::string_view cell_factor) {
  if (data.empty()) throw Error(ErrorKind::EmptyData, "dataset has no observations");
  const Column cells = categorical_view(data, cell_factor);
  const CellSummaryTable table = cell_summaries(data, cell_factor);
  ModelSpec spec;
  spec.base = Family::Poisson;
  spec.zi = ZiType::A;
  spec.mean_design = DesignSpec::saturated(cell_factor);
  spec.gamma_design = DesignSpec::constant();

  std::vector<std::string> warnings;
  Eigen::VectorXd params(static_cast<Eigen::Index>(table.cells.size()) + 1);
  for (std::size_t k = 0; k < table.cells.size(); ++k) {
    const CellSummary& s = table.cells[k];
    if (s.n_zero == s.n)
      throw Error(ErrorKind::EmptyPositiveCell, "cell '" + s.cell + "' has no positive counts");
    double lambda = truncated_poisson_lambda_from_mean(s.trunc_mean);
    if (lambda < 1e-8) {
      lambda = 1e-8;
      warnings.push_back("cell '" + s.cell + "' has only ones among its positives; lambda clamped to 1e-8");
    }
    params[static_cast<Eigen::Index>(k)] = std::log(lambda);
  }
  double p0 = table.overall_p0;
  if (p0 <= 0.0 || p0 >= 1.0) {
    warnings.push_back("overall zero proportion is " + format_number(p0) + "; hurdle clamped away from the boundary");
    p0 = std::clamp(p0, kZeroProbFloor, 1.0 - kZeroProbFloor);
  }
  params[params.size() - 1] = logit(p0);

  FitResult result = evaluate_fit(spec, data, params);
  result.converged = true;
  result.warnings = std::move(warnings);
  try {
    result.vcov = vcov_numeric(result, data);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SingularHessian) throw;
    result.warnings.emplace_back(e.what());
  }
  return result;
}

Eigen::MatrixXd vcov_numeric(const FitResult& fit, const CountDataset& data) {
  const Likelihood lik(fit.spec, data);
  const Eigen::VectorXd& p = fit.params;
  const Eigen::Index k = p.size();
  Eigen::VectorXd h(k);
  for (Eigen::Index j = 0; j < k; ++j) h[j] = 1e-4 * std::fmax(1.0, std::fabs(p[j]));

  const auto shifted = [&](Eigen::Index a, double sa, Eigen::Index b, double sb) {
    Eigen::VectorXd q = p;
    q[a] += sa * h[a];
    q[b] += sb * h[b];
    return lik.terms(q);
  };
  Eigen::MatrixXd hess(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a; b < k; ++b) {
      const Eigen::VectorXd pp = shifted(a, 1, b, 1);
      const Eigen::VectorXd pm = shifted(a, 1, b, -1);
      const Eigen::VectorXd mp = shifted(a, -1, b, 1);
      const Eigen::VectorXd mm = shifted(a, -1, b, -1);
      double s = 0.0;
      for (Eigen::Index i = 0; i < pp.size(); ++i) s += (pp[i] - pm[i]) - (mp[i] - mm[i]);
      hess(a, b) = hess(b, a) = -s / (4.0 * h[a] * h[b]);
    }
  }
  if (!hess.allFinite()) throw Error(ErrorKind::SingularHessian, "Hessian is not finite");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
  const Eigen::VectorXd ev = eig.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  if (!(ev.minCoeff() > 1e-10 * std::fmax(top, 1e-300)))
    throw Error(ErrorKind::SingularHessian,
                "Hessian of -loglik is singular or indefinite (min eigenvalue " + format_number(ev.minCoeff()) + ")");
  Eigen::MatrixXd cov = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (cov + cov.transpose());
}

}  // namespace zinf
