#include "zinf/likelihood.hpp"

#include <cmath>

#include <boost/math/special_functions/digamma.hpp>

#include "zinf/errors.hpp"
#include "zinf/summation.hpp"

namespace zinf {
namespace {

struct BaseDerivatives {
  double log_pi0;
  double lp_eta;         // d log pi0 / d log lambda
  double lp_logphi;      // d log pi0 / d log phi
  double logpmf_eta;     // d log p(y) / d log lambda
  double logpmf_logphi;  // d log p(y) / d log phi
};

// psi(k + y) - psi(k)
double digamma_difference(double k, std::int64_t y) {
  if (y < 64) {
    double s = 0.0;
    for (std::int64_t j = 0; j < y; ++j) s += 1.0 / (k + static_cast<double>(j));
    return s;
  }
  return boost::math::digamma(k + static_cast<double>(y)) - boost::math::digamma(k);
}

BaseDerivatives base_derivatives(const BaseModel& base, std::int64_t y) {
  const double mu = base.lambda;
  const double yd = static_cast<double>(y);
  if (is_poisson_branch(base)) return {-mu, -mu, 0.0, yd - mu, 0.0};
  const double k = nb_size(base);
  const double log_ratio = -std::log1p(mu / k);  // log(k / (k + mu))
  // partials in (mu, k)
  const double lp_mu = -k / (k + mu);
  const double lp_k = log_ratio + mu / (k + mu);
  const double pmf_mu = yd / mu - (k + yd) / (k + mu);
  const double pmf_k = digamma_difference(k, y) + log_ratio + (mu - yd) / (k + mu);
  // d k / d log lambda is k for NB-lin (k = lambda / phi), 0 for NB-quad;
  // d k / d log phi is -k for both
  const double k_eta = base.family == Family::NBlin ? k : 0.0;
  return {k * log_ratio, mu * lp_mu + k_eta * lp_k, -k * lp_k, mu * pmf_mu + k_eta * pmf_k, -k * pmf_k};
}

}  // namespace

std::string model_label(const ModelSpec& spec) {
  std::string out(to_string(spec.base));
  if (spec.zi != ZiType::None) {
    out += "+";
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(to_string(spec.zi)[0]))));
  }
  return out;
}

Likelihood::Likelihood(ModelSpec spec, const CountDataset& data)
    : spec_(std::move(spec)), mean_(build_design(spec_.mean_design, data)), y_(data.y) {
  data.validate();
  if (spec_.zi != ZiType::None) gamma_ = build_design(spec_.gamma_design, data);
  if (spec_.phi_mode == PhiMode::Fixed && spec_.base != Family::Poisson &&
      (!(spec_.phi_fixed >= 0.0) || !std::isfinite(spec_.phi_fixed)))
    throw Error(ErrorKind::InvalidParameter, "fixed dispersion must be non-negative");
  layout_.n_mean = mean_.x.cols();
  layout_.n_gamma = gamma_.x.cols();
  layout_.has_log_phi = spec_.base != Family::Poisson && spec_.phi_mode == PhiMode::Free;
  for (const auto& n : mean_.names) layout_.names.push_back("mean:" + n);
  const bool theta = spec_.zi == ZiType::C && !spec_.type_c_deflation;
  for (const auto& n : gamma_.names) layout_.names.push_back((theta ? "logneggamma:" : "gamma:") + n);
  if (layout_.has_log_phi) layout_.names.emplace_back("log_phi");
}

void Likelihood::check_dims(const Eigen::VectorXd& params) const {
  if (params.size() != layout_.size())
    throw Error(ErrorKind::DimensionMismatch, "parameter vector has " + std::to_string(params.size()) +
                                                  " entries, model expects " +
                                                  std::to_string(layout_.size()));
  if (!params.allFinite()) throw Error(ErrorKind::NonFinite, "parameter vector is not finite");
}

double Likelihood::phi(const Eigen::VectorXd& params) const {
  if (spec_.base == Family::Poisson) return 0.0;
  if (layout_.has_log_phi) return std::exp(params[layout_.phi_index()]);
  return spec_.phi_fixed;
}

Eigen::VectorXd Likelihood::lambdas(const Eigen::VectorXd& params) const {
  check_dims(params);
  Eigen::VectorXd eta = mean_.x * params.head(layout_.n_mean);
  Eigen::VectorXd lam = eta.array().exp();
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    if (!(lam[i] > 0.0) || !std::isfinite(lam[i]))
      throw Error(ErrorKind::NonFinite, "mean overflow/underflow at observation " + std::to_string(i + 1));
  return lam;
}

Eigen::VectorXd Likelihood::gammas(const Eigen::VectorXd& params) const {
  check_dims(params);
  if (spec_.zi == ZiType::None) return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n()));
  Eigen::VectorXd g = gamma_.x * params.segment(layout_.gamma_offset(), layout_.n_gamma);
  if (spec_.zi == ZiType::C && !spec_.type_c_deflation) g = -g.array().exp();
  return g;
}

Likelihood::Term Likelihood::term(std::size_t i, double lambda, double gamma, double phi) const {
  const BaseModel base{spec_.base, lambda, phi};
  const double lp = base_log_zero_prob(base);
  const double l1m = std::log(-std::expm1(lp));
  const AlteredZero az = alter_zero(spec_.zi, lp, l1m, gamma, true);
  const std::int64_t y = y_[i];
  if (y == 0) return {az.log_pit0, 0.0};
  return {az.log1m_pit0, base_logpmf(base, y) - l1m};
}

Eigen::VectorXd Likelihood::terms(const Eigen::VectorXd& params) const {
  const Eigen::VectorXd lam = lambdas(params);
  const Eigen::VectorXd g = gammas(params);
  const double ph = phi(params);
  Eigen::VectorXd out(static_cast<Eigen::Index>(n()));
  for (std::size_t i = 0; i < n(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const Term t = term(i, lam[idx], g[idx], ph);
    out[idx] = t.zero + t.positive;
    if (std::isnan(out[idx]))
      throw Error(ErrorKind::NonFinite, "log-likelihood term is NaN at observation " + std::to_string(i + 1));
  }
  return out;
}

double Likelihood::loglik(const Eigen::VectorXd& params) const {
  const Eigen::VectorXd t = terms(params);
  const double s = exact_sum({t.data(), static_cast<std::size_t>(t.size())});
  if (!std::isfinite(s)) throw Error(ErrorKind::NonFinite, "log-likelihood is not finite");
  return s;
}

LogLikParts Likelihood::decomposed(const Eigen::VectorXd& params) const {
  const Eigen::VectorXd lam = lambdas(params);
  const Eigen::VectorXd g = gammas(params);
  const double ph = phi(params);
  std::vector<double> zero(n()), positive(n());
  for (std::size_t i = 0; i < n(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const Term t = term(i, lam[idx], g[idx], ph);
    zero[i] = t.zero;
    positive[i] = t.positive;
  }
  LogLikParts parts{exact_sum(zero), exact_sum(positive)};
  if (!std::isfinite(parts.zero_part) || !std::isfinite(parts.positive_part))
    throw Error(ErrorKind::NonFinite, "log-likelihood is not finite");
  return parts;
}

Eigen::VectorXd Likelihood::gradient(const Eigen::VectorXd& params) const {
  const Eigen::VectorXd lam = lambdas(params);
  const Eigen::VectorXd g = gammas(params);
  const double ph = phi(params);
  const bool theta = spec_.zi == ZiType::C && !spec_.type_c_deflation;
  const double lo = std::log(kZeroProbFloor);
  const double hi = std::log1p(-kZeroProbFloor);
  const auto nn = static_cast<Eigen::Index>(n());
  Eigen::VectorXd s_eta(nn);    // d l_i / d log lambda_i
  Eigen::VectorXd s_gamma(nn);  // d l_i / d (gamma linear predictor)_i
  double s_phi = 0.0;           // d l / d log phi
  for (Eigen::Index i = 0; i < nn; ++i) {
    const std::int64_t yi = y_[static_cast<std::size_t>(i)];
    const BaseModel base{spec_.base, lam[i], ph};
    const BaseDerivatives bd = base_derivatives(base, yi);
    const double m = std::log(-std::expm1(bd.log_pi0));
    const double r0 = std::exp(bd.log_pi0 - m);  // pi0 / (1 - pi0)
    const AlteredZero az = alter_zero(spec_.zi, bd.log_pi0, m, g[i], true);
    const double l0 = az.log_pit0, l1 = az.log1m_pit0;

    // derivatives of log pit0 and log(1 - pit0) in (log pi0, gamma)
    double d0_lp = 0.0, d0_g = 0.0, d1_lp = 0.0, d1_g = 0.0;
    switch (spec_.zi) {
      case ZiType::None:
        d0_lp = 1.0;
        d1_lp = -r0;
        break;
      case ZiType::A:
        d0_g = std::exp(l1);
        d1_g = -std::exp(l0);
        break;
      case ZiType::B: {
        d0_lp = std::exp(g[i]);
        d0_g = l0;
        const double odds = std::exp(l0 - l1);
        d1_lp = -odds * d0_lp;
        d1_g = -odds * d0_g;
        break;
      }
      case ZiType::C: {
        d1_lp = -r0;
        d1_g = 1.0;
        const double inv_odds = std::exp(l1 - l0);
        d0_lp = -inv_odds * d1_lp;
        d0_g = -inv_odds * d1_g;
        break;
      }
      case ZiType::D:
        d0_lp = std::exp(l1) * (1.0 + r0);
        d0_g = std::exp(l1);
        d1_lp = -std::exp(l0) * (1.0 + r0);
        d1_g = -std::exp(l0);
        break;
    }

    double dl_lp = 0.0, dl_g = 0.0;
    if (yi == 0) {
      if (l0 > lo && l0 < hi) {
        dl_lp = d0_lp;
        dl_g = d0_g;
      }
    } else {
      if (l1 > lo && l1 < hi) {
        dl_lp = d1_lp;
        dl_g = d1_g;
      }
      dl_lp += r0;  // - d log(1 - pi0) / d log pi0
    }
    s_eta[i] = dl_lp * bd.lp_eta + (yi > 0 ? bd.logpmf_eta : 0.0);
    s_gamma[i] = theta ? dl_g * g[i] : dl_g;
    s_phi += dl_lp * bd.lp_logphi + (yi > 0 ? bd.logpmf_logphi : 0.0);
  }
  Eigen::VectorXd grad(layout_.size());
  grad.head(layout_.n_mean) = mean_.x.transpose() * s_eta;
  if (layout_.n_gamma > 0) grad.segment(layout_.gamma_offset(), layout_.n_gamma) = gamma_.x.transpose() * s_gamma;
  if (layout_.has_log_phi) grad[layout_.phi_index()] = s_phi;
  if (!grad.allFinite()) throw Error(ErrorKind::NonFinite, "score is not finite");
  return grad;
}

Eigen::VectorXd Likelihood::numeric_gradient(const Eigen::VectorXd& params, double step) const {
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidParameter, "difference step must be positive");
  check_dims(params);
  Eigen::VectorXd grad(params.size());
  for (Eigen::Index j = 0; j < params.size(); ++j) {
    const double h = step * std::fmax(1.0, std::fabs(params[j]));
    Eigen::VectorXd up = params;
    Eigen::VectorXd down = params;
    up[j] += h;
    down[j] -= h;
    const Eigen::VectorXd tu = terms(up);
    const Eigen::VectorXd td = terms(down);
    double s = 0.0;
    for (Eigen::Index i = 0; i < tu.size(); ++i) s += tu[i] - td[i];
    grad[j] = s / (up[j] - down[j]);
    if (!std::isfinite(grad[j])) throw Error(ErrorKind::NonFinite, "numeric score is not finite");
  }
  return grad;
}

std::vector<ObservationFit> Likelihood::fitted(const Eigen::VectorXd& params) const {
  const Eigen::VectorXd lam = lambdas(params);
  const Eigen::VectorXd g = gammas(params);
  const double ph = phi(params);
  std::vector<ObservationFit> out(n());
  for (std::size_t i = 0; i < n(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const BaseModel base{spec_.base, lam[idx], ph};
    const double lp = base_log_zero_prob(base);
    const double l1m = std::log(-std::expm1(lp));
    const AlteredZero az = alter_zero(spec_.zi, lp, l1m, g[idx], true);
    out[i] = {lam[idx], g[idx], std::exp(lp), std::exp(az.log_pit0), std::exp(az.log_rho) * lam[idx]};
  }
  return out;
}

std::vector<ZiModel> Likelihood::observation_models(const Eigen::VectorXd& params) const {
  const Eigen::VectorXd lam = lambdas(params);
  const Eigen::VectorXd g = gammas(params);
  const double ph = phi(params);
  std::vector<ZiModel> out(n());
  for (std::size_t i = 0; i < n(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    out[i] = ZiModel{BaseModel{spec_.base, lam[idx], ph}, spec_.zi, g[idx]};
  }
  return out;
}

double loglik(const ModelSpec& spec, const CountDataset& data, const Eigen::VectorXd& params) {
  return Likelihood(spec, data).loglik(params);
}

LogLikParts loglik_decomposed(const ModelSpec& spec, const CountDataset& data,
                              const Eigen::VectorXd& params) {
  return Likelihood(spec, data).decomposed(params);
}

Eigen::VectorXd score_numeric(const ModelSpec& spec, const CountDataset& data,
                              const Eigen::VectorXd& params, double step) {
  return Likelihood(spec, data).numeric_gradient(params, step);
}

double exp_family_log_carrier(const BaseModel& base, std::int64_t y) {
  validate(base);
  if (base.family == Family::NBlin && !is_poisson_branch(base))
    throw Error(ErrorKind::Unsupported, "NB-lin is not an exponential family");
  if (y < 0) throw Error(ErrorKind::Domain, "count must be non-negative");
  const double yd = static_cast<double>(y);
  if (is_poisson_branch(base)) return -log_gamma(yd + 1.0);
  const double k = nb_size(base);
  return log_gamma(k + yd) - log_gamma(k) - log_gamma(yd + 1.0);
}

TypeDNaturals typeD_naturals(const BaseModel& base, double gamma) {
  validate(base);
  if (base.family == Family::NBlin)
    throw Error(ErrorKind::Unsupported, "NB-lin is not an exponential family");
  double eta = 0.0;
  if (is_poisson_branch(base)) {
    eta = std::log(base.lambda);
  } else {
    const double k = nb_size(base);
    eta = std::log(base.lambda) - std::log(k + base.lambda);
  }
  const double lp = base_log_zero_prob(base);
  const AlteredZero az = alter_zero(ZiType::D, lp, std::log(-std::expm1(lp)), gamma, false);
  return {eta, gamma - az.log_pit0};
}

}  // namespace zinf
