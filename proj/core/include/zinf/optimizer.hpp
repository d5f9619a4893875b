#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace zinf {

struct Objective {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

struct OptimizerOptions {
  int max_iterations = 500;
  double gradient_tol = 1e-6;  // on the max-norm of the projected gradient
  double relative_tol = 1e-10; // on the objective change of the last step
  Eigen::VectorXd lower;       // empty means unbounded
  Eigen::VectorXd upper;
};

struct OptimizerResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  bool converged = false;
  std::string message;
};

/// Box-constrained BFGS minimiser with Armijo backtracking. Objective
/// evaluations that throw zinf::Error or return non-finite values are
/// treated as +inf and shrink the step.
OptimizerResult minimize_bfgs(const Objective& objective, Eigen::VectorXd x0,
                              const OptimizerOptions& options);

/// Max-norm of the gradient with components that push against an active
/// bound removed.
double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& gradient,
                               const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

}  // namespace zinf
