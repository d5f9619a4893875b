#include "zinf/dist.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "zinf/errors.hpp"
#include "zinf/roots.hpp"

namespace zinf {
namespace {

std::string normalise_token(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '-' || c == '_') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

// log Gamma(k + y) - log Gamma(k) - y log k, summed term by term for small y so
// that large k (near-Poisson NB) keeps full precision.
double log_rising_ratio(double k, std::int64_t y) {
  if (y < 64) {
    double s = 0.0;
    for (std::int64_t j = 1; j < y; ++j) s += std::log1p(static_cast<double>(j) / k);
    return s;
  }
  return log_gamma(k + static_cast<double>(y)) - log_gamma(k) -
         static_cast<double>(y) * std::log(k);
}

void check_count(std::int64_t y) {
  if (y < 0) throw Error(ErrorKind::Domain, "count must be non-negative, got " + std::to_string(y));
}

}  // namespace

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::Poisson: return "poisson";
    case Family::NBquad: return "nbquad";
    case Family::NBlin: return "nblin";
  }
  return "unknown";
}

Family parse_family(std::string_view text) {
  const std::string t = normalise_token(text);
  if (t == "poisson") return Family::Poisson;
  if (t == "nbquad" || t == "nb2") return Family::NBquad;
  if (t == "nblin" || t == "nb1") return Family::NBlin;
  throw Error(ErrorKind::InvalidParameter, "unknown base family '" + std::string(text) + "'");
}

void validate(const BaseModel& model) {
  if (!(model.lambda > 0.0) || !std::isfinite(model.lambda))
    throw Error(ErrorKind::InvalidParameter,
                "mean parameter must be positive and finite, got " + std::to_string(model.lambda));
  if (!(model.phi >= 0.0) || !std::isfinite(model.phi))
    throw Error(ErrorKind::InvalidParameter,
                "dispersion must be non-negative and finite, got " + std::to_string(model.phi));
}

bool is_poisson_branch(const BaseModel& model) noexcept {
  return model.family == Family::Poisson || model.phi < kPoissonLimitPhi;
}

double nb_size(const BaseModel& model) {
  validate(model);
  if (is_poisson_branch(model)) return std::numeric_limits<double>::infinity();
  return model.family == Family::NBquad ? 1.0 / model.phi : model.lambda / model.phi;
}

double log_gamma(double x) noexcept {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double base_logpmf(const BaseModel& model, std::int64_t y) {
  validate(model);
  check_count(y);
  const double mu = model.lambda;
  const double yd = static_cast<double>(y);
  if (is_poisson_branch(model)) return yd * std::log(mu) - mu - log_gamma(yd + 1.0);
  const double k = nb_size(model);
  // log[Gamma(k+y)/(y! Gamma(k))] + k log(k/(k+mu)) + y log(mu/(k+mu))
  return log_rising_ratio(k, y) - log_gamma(yd + 1.0) + yd * std::log(mu) -
         (k + yd) * std::log1p(mu / k);
}

double base_log_zero_prob(const BaseModel& model) {
  validate(model);
  if (is_poisson_branch(model)) return -model.lambda;
  const double k = nb_size(model);
  return -k * std::log1p(model.lambda / k);
}

double base_log_nonzero_prob(const BaseModel& model) {
  return std::log(-std::expm1(base_log_zero_prob(model)));
}

double base_zero_prob(const BaseModel& model) { return std::exp(base_log_zero_prob(model)); }

double base_mean(const BaseModel& model) {
  validate(model);
  return model.lambda;
}

double base_variance(const BaseModel& model) {
  validate(model);
  const double mu = model.lambda;
  switch (model.family) {
    case Family::Poisson: return mu;
    case Family::NBquad: return mu + model.phi * mu * mu;
    case Family::NBlin: return mu * (1.0 + model.phi);
  }
  return mu;
}

double base_pmf_ratio(const BaseModel& model, std::int64_t y) {
  validate(model);
  check_count(y);
  const double yd = static_cast<double>(y);
  if (is_poisson_branch(model)) return model.lambda / (yd + 1.0);
  const double k = nb_size(model);
  return (k + yd) / (yd + 1.0) * (model.lambda / (k + model.lambda));
}

double truncated_poisson_logpmf(double lambda, std::int64_t y) {
  if (y < 1) throw Error(ErrorKind::Domain, "zero-truncated pmf requires y >= 1");
  const BaseModel base{Family::Poisson, lambda, 0.0};
  return base_logpmf(base, y) - base_log_nonzero_prob(base);
}

double truncated_poisson_mean(double lambda) {
  validate(BaseModel{Family::Poisson, lambda, 0.0});
  return lambda / -std::expm1(-lambda);
}

double truncated_poisson_lambda_from_mean(double truncated_mean) {
  if (!(truncated_mean >= 1.0) || !std::isfinite(truncated_mean))
    throw Error(ErrorKind::Domain, "zero-truncated mean must be >= 1");
  if (truncated_mean == 1.0) return 0.0;
  // lambda < mean always; lambda/(1-e^-lambda) is increasing.
  const auto f = [truncated_mean](double lam) {
    return lam <= 0.0 ? 1.0 - truncated_mean : truncated_poisson_mean(lam) - truncated_mean;
  };
  return bisect_root(f, 0.0, truncated_mean, 1e-15);
}

}  // namespace zinf
