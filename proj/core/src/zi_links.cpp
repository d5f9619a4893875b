#include "zinf/zi_links.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "zinf/errors.hpp"
#include "zinf/roots.hpp"

namespace zinf {
namespace {

// log(1 + e^x) without overflow.
double softplus(double x) noexcept {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double logit(double p) noexcept { return std::log(p) - std::log1p(-p); }

void check_open_prob(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0))
    throw Error(ErrorKind::Domain, std::string(name) + " must lie in (0,1), got " + std::to_string(p));
}

void check_family_nb(Family family) {
  if (family == Family::Poisson)
    throw Error(ErrorKind::InvalidParameter, "implicit zero-inflation needs an NB family");
}

}  // namespace

std::string_view to_string(ZiType type) noexcept {
  switch (type) {
    case ZiType::A: return "a";
    case ZiType::B: return "b";
    case ZiType::C: return "c";
    case ZiType::D: return "d";
    case ZiType::None: return "none";
  }
  return "unknown";
}

ZiType parse_zi_type(std::string_view text) {
  std::string t;
  for (char c : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "a") return ZiType::A;
  if (t == "b") return ZiType::B;
  if (t == "c") return ZiType::C;
  if (t == "d") return ZiType::D;
  if (t == "none") return ZiType::None;
  throw Error(ErrorKind::InvalidParameter, "unknown zero-inflation type '" + std::string(text) + "'");
}

AlteredZero alter_zero(ZiType type, double log_pi0, double log1m_pi0, double gamma, bool clamp) {
  double lp = log_pi0;
  double l1m = log1m_pi0;
  switch (type) {
    case ZiType::None:
      break;
    case ZiType::A:
      lp = -softplus(-gamma);
      l1m = -softplus(gamma);
      break;
    case ZiType::B:
      lp = std::exp(gamma) * log_pi0;
      l1m = std::log(-std::expm1(lp));
      break;
    case ZiType::C: {
      const double t = gamma + log1m_pi0;  // log(1 - pit0)
      if (t >= 0.0) {
        if (!clamp)
          throw Error(ErrorKind::Infeasible,
                      "type C deflation leaves no zero mass (gamma=" + std::to_string(gamma) + ")");
        lp = std::log(kZeroProbFloor);
        l1m = std::log1p(-kZeroProbFloor);
      } else {
        l1m = t;
        lp = std::log(-std::expm1(t));
      }
      break;
    }
    case ZiType::D: {
      const double t = gamma + log_pi0 - log1m_pi0;  // logit(pit0)
      lp = -softplus(-t);
      l1m = -softplus(t);
      break;
    }
  }
  if (clamp) {
    const double lo = std::log(kZeroProbFloor);
    const double hi = std::log1p(-kZeroProbFloor);
    lp = std::clamp(lp, lo, hi);
    l1m = std::clamp(l1m, lo, hi);
  }
  return {lp, l1m, l1m - log1m_pi0};
}

double zi_zero_prob(ZiType type, double pi0, double gamma) {
  check_open_prob(pi0, "pi0");
  if (!std::isfinite(gamma)) throw Error(ErrorKind::Domain, "gamma must be finite");
  return std::exp(alter_zero(type, std::log(pi0), std::log1p(-pi0), gamma, false).log_pit0);
}

double zi_gamma_from_point(ZiType type, double pi0, double pit0, bool allow_deflation) {
  check_open_prob(pi0, "pi0");
  check_open_prob(pit0, "pit0");
  switch (type) {
    case ZiType::A: return logit(pit0);
    case ZiType::B: return std::log(std::log(pit0) / std::log(pi0));
    case ZiType::C: {
      const double g = std::log1p(-pit0) - std::log1p(-pi0);
      if (g > 0.0 && !allow_deflation)
        throw Error(ErrorKind::Infeasible,
                    "type C without deflation cannot reach pit0 below pi0");
      return g;
    }
    case ZiType::D: return logit(pit0) - logit(pi0);
    case ZiType::None: break;
  }
  throw Error(ErrorKind::InvalidParameter, "type none has no gamma");
}

double renormalizer(double pi0, double pit0) {
  if (!(pi0 >= 0.0 && pi0 < 1.0))
    throw Error(ErrorKind::Domain, "pi0 must lie in [0,1), got " + std::to_string(pi0));
  if (!(pit0 >= 0.0 && pit0 < 1.0))
    throw Error(ErrorKind::Domain, "pit0 must lie in [0,1), got " + std::to_string(pit0));
  return (1.0 - pit0) / (1.0 - pi0);
}

double zi_logpmf(const ZiModel& model, std::int64_t y) {
  const double base = base_logpmf(model.base, y);
  const AlteredZero az = alter_zero(model.zi, base_log_zero_prob(model.base),
                                    base_log_nonzero_prob(model.base), model.gamma, false);
  return y == 0 ? az.log_pit0 : az.log_rho + base;
}

double zi_mean(const ZiModel& model) {
  const AlteredZero az = alter_zero(model.zi, base_log_zero_prob(model.base),
                                    base_log_nonzero_prob(model.base), model.gamma, false);
  return std::exp(az.log_rho) * base_mean(model.base);
}

double zi_model_zero_prob(const ZiModel& model) {
  return std::exp(alter_zero(model.zi, base_log_zero_prob(model.base),
                             base_log_nonzero_prob(model.base), model.gamma, false)
                      .log_pit0);
}

double zi_link(ZiType type, double p) {
  check_open_prob(p, "p");
  switch (type) {
    case ZiType::A:
    case ZiType::D: return logit(p);
    case ZiType::B: return std::log(-std::log(p));
    case ZiType::C: return std::log1p(-p);
    case ZiType::None: break;
  }
  throw Error(ErrorKind::InvalidParameter, "type none has no link");
}

double implicit_zi_curve(Family family, double pi0_poisson, double phi) {
  check_family_nb(family);
  check_open_prob(pi0_poisson, "pi0");
  if (!(phi >= 0.0) || !std::isfinite(phi))
    throw Error(ErrorKind::Domain, "dispersion must be non-negative");
  if (phi == 0.0) return pi0_poisson;
  const double lp = std::log(pi0_poisson);
  if (family == Family::NBlin) return std::exp(std::log1p(phi) / phi * lp);
  return std::exp(-std::log1p(-phi * lp) / phi);
}

double match_dispersion_through_point(Family family, double pi0_poisson, double pit0) {
  check_family_nb(family);
  check_open_prob(pi0_poisson, "pi0");
  check_open_prob(pit0, "pit0");
  if (!(pit0 > pi0_poisson))
    throw Error(ErrorKind::NoSolution, "over-dispersion only inflates zeros: need pit0 > pi0");
  const double target = std::log(pit0);
  const auto f = [&](double phi) { return std::log(implicit_zi_curve(family, pi0_poisson, phi)) - target; };
  double hi = 1.0;
  while (f(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw Error(ErrorKind::NoSolution, "dispersion bracket overflow");
  }
  return bisect_root(f, 0.0, hi, 1e-16);
}

}  // namespace zinf
