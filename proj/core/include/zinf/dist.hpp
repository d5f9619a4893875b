#pragma once

#include <cstdint>
#include <string_view>

namespace zinf {

enum class Family { Poisson, NBquad, NBlin };

std::string_view to_string(Family family) noexcept;
/// Accepts "poisson", "nbquad", "nblin" (case-insensitive, '-' and '_' ignored).
Family parse_family(std::string_view text);

/// Dispersion values below this are evaluated on the Poisson branch.
inline constexpr double kPoissonLimitPhi = 1e-8;

/// Base count distribution. For the NB families `lambda` is the mean mu.
/// NB-quad has size k = 1/phi (variance mu + phi mu^2); NB-lin has
/// k = mu/phi (variance mu (1 + phi)).
struct BaseModel {
  Family family = Family::Poisson;
  double lambda = 1.0;
  double phi = 0.0;
};

void validate(const BaseModel& model);

/// True when the model is evaluated as a Poisson (family or phi below the limit).
bool is_poisson_branch(const BaseModel& model) noexcept;

/// NB size parameter k; infinite on the Poisson branch.
double nb_size(const BaseModel& model);

/// Thread-safe log-gamma for positive arguments.
double log_gamma(double x) noexcept;

double base_logpmf(const BaseModel& model, std::int64_t y);
double base_log_zero_prob(const BaseModel& model);
/// log(1 - pi_0), accurate when pi_0 is close to 0 or 1.
double base_log_nonzero_prob(const BaseModel& model);
double base_zero_prob(const BaseModel& model);
double base_mean(const BaseModel& model);
double base_variance(const BaseModel& model);

/// pi_{y+1} / pi_y, used for sequential pmf evaluation.
double base_pmf_ratio(const BaseModel& model, std::int64_t y);

double truncated_poisson_logpmf(double lambda, std::int64_t y);
/// Mean of the zero-truncated Poisson, lambda / (1 - exp(-lambda)).
double truncated_poisson_mean(double lambda);
/// Inverse of truncated_poisson_mean on (1, inf); returns 0 for target 1.
double truncated_poisson_lambda_from_mean(double truncated_mean);

}  // namespace zinf
