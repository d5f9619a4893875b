#include "zinf/simulate.hpp"

#include <cmath>
#include <limits>

#include "zinf/errors.hpp"

namespace zinf {
namespace {

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

std::int64_t sample_truncated(const BaseModel& base, Rng& rng) {
  const double log_target = std::log(rng.uniform()) + base_log_nonzero_prob(base);
  const double mean = base_mean(base);
  // Log-concave cases (size >= 1) put under 1e-17 of their mass more than 40
  // standard deviations below the mean, so large means start there.
  std::int64_t start = 1;
  if (mean > 100.0 && nb_size(base) >= 1.0) {
    const double lo = std::floor(mean - 40.0 * std::sqrt(base_variance(base)));
    if (lo > 1.0) start = static_cast<std::int64_t>(lo);
  }
  if (mean + 40.0 * std::sqrt(base_variance(base)) - static_cast<double>(start) > 1e8)
    throw Error(ErrorKind::Unsupported, "mean " + format_number(mean) + " is too large to sample by inversion");
  double log_p = base_logpmf(base, start);
  double log_cum = -std::numeric_limits<double>::infinity();
  for (std::int64_t y = start;; ++y) {
    log_cum = log_add_exp(log_cum, log_p);
    if (log_cum >= log_target) return y;
    // past the mode with a negligible remaining tail: rounding kept the
    // cumulative sum below the target
    if (static_cast<double>(y) > mean && log_p < log_cum - 40.0) return y;
    log_p += std::log(base_pmf_ratio(base, y));
  }
}

std::int64_t sample_zi(const ZiModel& model, Rng& rng) {
  const double pit0 = zi_model_zero_prob(model);
  if (rng.uniform() < pit0) return 0;
  return sample_truncated(model.base, rng);
}

CountDataset simulate(const SimPlan& plan) {
  if (plan.n < 1) throw Error(ErrorKind::InvalidParameter, "simulation size must be at least 1");
  // covariate templates may carry no response column
  std::size_t m = plan.covariates.size();
  if (m == 0 && !plan.covariates.covariates.empty()) m = plan.covariates.covariates.front().size();
  CountDataset out;
  out.response_name = plan.covariates.response_name;
  out.cell_column = plan.covariates.cell_column;
  out.y.assign(plan.n, 0);
  if (m > 0) {
    for (const auto& c : plan.covariates.covariates) {
      Column r = c;
      if (c.kind == ColumnKind::Numeric) {
        r.values.resize(plan.n);
        for (std::size_t i = 0; i < plan.n; ++i) r.values[i] = c.values[i % m];
      } else {
        r.codes.resize(plan.n);
        for (std::size_t i = 0; i < plan.n; ++i) r.codes[i] = c.codes[i % m];
      }
      out.covariates.push_back(std::move(r));
    }
  }
  const Likelihood lik(plan.spec, out);
  const std::vector<ZiModel> models = lik.observation_models(plan.true_params);
  Rng rng(plan.seed);
  for (std::size_t i = 0; i < plan.n; ++i) out.y[i] = sample_zi(models[i], rng);
  return out;
}

}  // namespace zinf
