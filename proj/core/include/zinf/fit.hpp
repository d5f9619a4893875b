#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "zinf/dataset.hpp"
#include "zinf/errors.hpp"
#include "zinf/likelihood.hpp"

namespace zinf {

struct FitOptions {
  int max_iterations = 500;
  double gradient_tol = 1e-6;
  std::uint64_t seed = 1;
  int restarts = 3;          // jittered restarts used only when the first run fails
  bool compute_vcov = true;
  std::optional<Eigen::VectorXd> start;  // overrides the default warm start
};

struct FitResult {
  ModelSpec spec;
  Eigen::VectorXd params;
  std::vector<std::string> param_names;
  double loglik_value = 0.0;
  double aic = 0.0;
  std::vector<double> fitted_lambda;  // base mean per observation
  std::vector<double> fitted_mu;      // rho_i * lambda_i
  std::vector<double> fitted_pi0;     // base zero probability
  std::vector<double> fitted_pit0;    // altered zero probability
  std::optional<Eigen::MatrixXd> vcov;
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> warnings;

  double phi() const;
  /// Standard errors from vcov (empty when vcov is absent).
  Eigen::VectorXd standard_errors() const;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, FitResult best)
      : Error(ErrorKind::NonConvergence, what), best_(std::move(best)) {}
  const FitResult& best() const noexcept { return best_; }

 private:
  FitResult best_;
};

/// Fitted quantities, log-likelihood and AIC at a given parameter vector.
FitResult evaluate_fit(const ModelSpec& spec, const CountDataset& data, const Eigen::VectorXd& params);

/// Default warm start: Poisson log-linear coefficients for the mean, the
/// neutral gamma (logit of the zero share for type A), log phi = log 0.5.
Eigen::VectorXd default_start(const ModelSpec& spec, const CountDataset& data);

/// Maximum likelihood by box-bounded BFGS. Throws NonConvergenceError
/// carrying the best point when no run meets the gradient test.
FitResult fit_mle(const ModelSpec& spec, const CountDataset& data, const FitOptions& options = {});

/// Closed-form type A fit: Poisson base with one mean per cell and a
/// constant hurdle. gamma = logit(p0); each cell lambda solves the
/// zero-truncated mean equation.
FitResult fit_type_a_twopart(const CountDataset& data, std::string_view cell_factor);

/// Inverse of the central-difference Hessian of -loglik at fit.params.
/// Throws SingularHessian when it is not positive definite.
Eigen::MatrixXd vcov_numeric(const FitResult& fit, const CountDataset& data);

/// Poisson log-linear coefficients by Newton iterations (used for warm starts).
Eigen::VectorXd poisson_loglinear(const Eigen::MatrixXd& x, const std::vector<std::int64_t>& y);

}  // namespace zinf
