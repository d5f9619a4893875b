#include "zinf/optimizer.hpp"

#include <cmath>
#include <limits>

#include "zinf/errors.hpp"

namespace zinf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_value(const Objective& f, const Eigen::VectorXd& x) {
  try {
    const double v = f.value(x);
    return std::isfinite(v) ? v : kInf;
  } catch (const Error&) {
    return kInf;
  }
}

Eigen::VectorXd project(Eigen::VectorXd x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  if (lo.size() == x.size()) x = x.cwiseMax(lo);
  if (hi.size() == x.size()) x = x.cwiseMin(hi);
  return x;
}

bool at_lower(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, Eigen::Index j) {
  return lo.size() == x.size() && x[j] <= lo[j];
}
bool at_upper(const Eigen::VectorXd& x, const Eigen::VectorXd& hi, Eigen::Index j) {
  return hi.size() == x.size() && x[j] >= hi[j];
}

}  // namespace

double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                               const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  double m = 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    // minimising: a positive gradient at the lower bound (or negative at the
    // upper) points out of the box
    if (at_lower(x, lo, j) && g[j] > 0.0) continue;
    if (at_upper(x, hi, j) && g[j] < 0.0) continue;
    m = std::fmax(m, std::fabs(g[j]));
  }
  return m;
}

OptimizerResult minimize_bfgs(const Objective& objective, Eigen::VectorXd x0,
                              const OptimizerOptions& opt) {
  const Eigen::Index n = x0.size();
  OptimizerResult res;
  res.x = project(std::move(x0), opt.lower, opt.upper);
  res.value = safe_value(objective, res.x);
  if (!std::isfinite(res.value)) {
    res.message = "objective not finite at the starting point";
    return res;
  }
  res.gradient = objective.gradient(res.x);
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  bool fresh = true;
  double last_change = kInf;

  for (int it = 0; it < opt.max_iterations; ++it) {
    res.iterations = it;
    const double pg = projected_gradient_norm(res.x, res.gradient, opt.lower, opt.upper);
    if (pg < opt.gradient_tol && (it == 0 || last_change <= opt.relative_tol)) {
      res.converged = true;
      res.message = "gradient and objective change below tolerance";
      return res;
    }
    if (fresh) {
      // scale the first step so it moves about one unit in the steepest coordinate
      const double gmax = res.gradient.cwiseAbs().maxCoeff();
      h_inv = Eigen::MatrixXd::Identity(n, n) * (gmax > 1.0 ? 1.0 / gmax : 1.0);
    }
    Eigen::VectorXd d = -h_inv * res.gradient;
    for (Eigen::Index j = 0; j < n; ++j)
      if ((at_lower(res.x, opt.lower, j) && d[j] < 0.0) || (at_upper(res.x, opt.upper, j) && d[j] > 0.0))
        d[j] = 0.0;
    double slope = res.gradient.dot(d);
    if (!(slope < 0.0)) {
      if (fresh) {
        res.message = "no descent direction";
        res.converged = pg < opt.gradient_tol;
        return res;
      }
      fresh = true;
      --it;
      continue;
    }

    double t = 1.0;
    Eigen::VectorXd x_new;
    double f_new = kInf;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = project(res.x + t * d, opt.lower, opt.upper);
      f_new = safe_value(objective, x_new);
      if (std::isfinite(f_new) && f_new <= res.value + 1e-4 * res.gradient.dot(x_new - res.x)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (!fresh) {
        fresh = true;
        continue;
      }
      res.message = "line search failed";
      res.converged = pg < opt.gradient_tol;
      return res;
    }

    const Eigen::VectorXd g_new = objective.gradient(x_new);
    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd yv = g_new - res.gradient;
    last_change = std::fabs(f_new - res.value) / std::fmax(1.0, std::fabs(res.value));
    res.x = x_new;
    res.value = f_new;
    res.gradient = g_new;

    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      if (fresh) h_inv = Eigen::MatrixXd::Identity(n, n) * (sy / yv.squaredNorm());
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
      h_inv = (eye - rho * s * yv.transpose()) * h_inv * (eye - rho * yv * s.transpose()) +
              rho * s * s.transpose();
      fresh = false;
    }
    if (last_change == 0.0 && s.cwiseAbs().maxCoeff() == 0.0) {
      res.message = "step underflow";
      res.converged = projected_gradient_norm(res.x, res.gradient, opt.lower, opt.upper) < opt.gradient_tol;
      return res;
    }
  }
  res.iterations = opt.max_iterations;
  res.converged = projected_gradient_norm(res.x, res.gradient, opt.lower, opt.upper) < opt.gradient_tol &&
                  last_change <= opt.relative_tol;
  res.message = res.converged ? "converged at iteration limit" : "iteration limit reached";
  return res;
}

}  // namespace zinf
