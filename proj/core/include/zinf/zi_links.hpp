#pragma once

#include <cstdint>
#include <string_view>

#include "zinf/dist.hpp"

namespace zinf {

/// Explicit zero-alteration types. Each maps the base zero probability pi0
/// to an altered one through g(pit0) = gamma + g(pi0), except A where
/// logit(pit0) = gamma:
///   A  logit link, constant hurdle
///   B  complementary log-log, pit0 = pi0^(e^gamma)
///   C  log(1 - p), the zero-inflated mixture with q = 1 - e^gamma
///   D  logit, odds of a zero multiplied by e^gamma
enum class ZiType { A, B, C, D, None };

std::string_view to_string(ZiType type) noexcept;
/// Accepts "a".."d" and "none" (case-insensitive).
ZiType parse_zi_type(std::string_view text);

/// Altered zero probabilities are clamped to [kZeroProbFloor, 1 - kZeroProbFloor]
/// before logs are taken inside likelihoods.
inline constexpr double kZeroProbFloor = 1e-12;

struct ZiModel {
  BaseModel base;
  ZiType zi = ZiType::None;
  double gamma = 0.0;
};

/// Log-space result of altering a zero probability.
struct AlteredZero {
  double log_pit0;   // log pit0
  double log1m_pit0; // log(1 - pit0)
  double log_rho;    // log renormaliser (1 - pit0)/(1 - pi0)
};

/// Alters log pi0 / log(1 - pi0). With clamp=false a type C deflation that
/// empties the zero class throws Infeasible; with clamp=true the result is
/// held at the floor instead (likelihood evaluation).
AlteredZero alter_zero(ZiType type, double log_pi0, double log1m_pi0, double gamma, bool clamp);

double zi_zero_prob(ZiType type, double pi0, double gamma);

/// Inverse of zi_zero_prob in gamma. Type C values with gamma > 0 are only
/// returned when allow_deflation is set.
double zi_gamma_from_point(ZiType type, double pi0, double pit0, bool allow_deflation = false);

double renormalizer(double pi0, double pit0);

double zi_logpmf(const ZiModel& model, std::int64_t y);
double zi_mean(const ZiModel& model);
/// Altered zero probability of a full model (pi0 taken from the base).
double zi_model_zero_prob(const ZiModel& model);

/// Link function g(p) of a type: logit for A and D, log(-log p) for B,
/// log(1 - p) for C.
double zi_link(ZiType type, double p);

/// Zero probability induced by NB over-dispersion, written as a function of
/// the Poisson zero probability at the same mean (mu = -log pi0P).
double implicit_zi_curve(Family family, double pi0_poisson, double phi);

/// Dispersion whose implicit curve passes through (pi0_poisson, pit0).
double match_dispersion_through_point(Family family, double pi0_poisson, double pit0);

}  // namespace zinf
