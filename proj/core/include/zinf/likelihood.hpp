#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zinf/dataset.hpp"
#include "zinf/design.hpp"
#include "zinf/dist.hpp"
#include "zinf/zi_links.hpp"

namespace zinf {

enum class PhiMode { Fixed, Free };

/// Full regression model: log link for the base mean, identity link for
/// gamma (the ZI type supplies the link to the zero probability).
///
/// Parameter vector layout: [mean coefficients..., gamma coefficients...,
/// log phi (NB families with free phi)]. Type C without deflation uses
/// gamma_i = -exp(z_i' theta), so its gamma block holds theta.
struct ModelSpec {
  Family base = Family::Poisson;
  ZiType zi = ZiType::None;
  DesignSpec mean_design;
  DesignSpec gamma_design = DesignSpec::constant();
  PhiMode phi_mode = PhiMode::Free;
  double phi_fixed = 0.0;
  bool type_c_deflation = false;

  bool operator==(const ModelSpec&) const = default;
};

/// Short label such as "poisson", "nbquad" or "poisson+D".
std::string model_label(const ModelSpec& spec);

struct ParamLayout {
  Eigen::Index n_mean = 0;
  Eigen::Index n_gamma = 0;
  bool has_log_phi = false;
  std::vector<std::string> names;

  Eigen::Index size() const noexcept { return n_mean + n_gamma + (has_log_phi ? 1 : 0); }
  Eigen::Index gamma_offset() const noexcept { return n_mean; }
  Eigen::Index phi_index() const noexcept { return n_mean + n_gamma; }
};

struct LogLikParts {
  double zero_part = 0.0;
  double positive_part = 0.0;
};

/// Per-observation fitted quantities at a parameter point.
struct ObservationFit {
  double lambda;  // base mean
  double gamma;
  double pi0;     // base zero probability
  double pit0;    // altered zero probability (clamped)
  double mu;      // altered mean rho * lambda
};

/// A model bound to a dataset, with design matrices built once.
class Likelihood {
 public:
  Likelihood(ModelSpec spec, const CountDataset& data);

  const ModelSpec& spec() const noexcept { return spec_; }
  const ParamLayout& layout() const noexcept { return layout_; }
  std::size_t n() const noexcept { return y_.size(); }
  const DesignMatrix& mean_design() const noexcept { return mean_; }
  const DesignMatrix& gamma_design() const noexcept { return gamma_; }
  const std::vector<std::int64_t>& counts() const noexcept { return y_; }

  double loglik(const Eigen::VectorXd& params) const;
  LogLikParts decomposed(const Eigen::VectorXd& params) const;
  /// Per-observation log-likelihood contributions.
  Eigen::VectorXd terms(const Eigen::VectorXd& params) const;

  /// Analytic score (chain rule through log pi0, the ZI link and the NB
  /// size parameter).
  Eigen::VectorXd gradient(const Eigen::VectorXd& params) const;
  /// Central differences with per-coordinate step step * max(1, |p_j|); the
  /// per-observation differences are summed to limit cancellation.
  Eigen::VectorXd numeric_gradient(const Eigen::VectorXd& params, double step = 1e-6) const;

  double phi(const Eigen::VectorXd& params) const;
  Eigen::VectorXd lambdas(const Eigen::VectorXd& params) const;
  Eigen::VectorXd gammas(const Eigen::VectorXd& params) const;
  std::vector<ObservationFit> fitted(const Eigen::VectorXd& params) const;
  /// Unclamped per-observation models (used by the simulator).
  std::vector<ZiModel> observation_models(const Eigen::VectorXd& params) const;

 private:
  void check_dims(const Eigen::VectorXd& params) const;
  struct Term {
    double zero;
    double positive;
  };
  Term term(std::size_t i, double lambda, double gamma, double phi) const;

  ModelSpec spec_;
  ParamLayout layout_;
  DesignMatrix mean_;
  DesignMatrix gamma_;
  std::vector<std::int64_t> y_;
};

double loglik(const ModelSpec& spec, const CountDataset& data, const Eigen::VectorXd& params);
LogLikParts loglik_decomposed(const ModelSpec& spec, const CountDataset& data,
                              const Eigen::VectorXd& params);
Eigen::VectorXd score_numeric(const ModelSpec& spec, const CountDataset& data,
                              const Eigen::VectorXd& params, double step = 1e-6);

/// Exponential-family form of a type D model over a Poisson or NB-quad base:
/// log pit_y = y * eta + I(y=0) * gamma - cumulant + c(y).
struct TypeDNaturals {
  double eta;
  double cumulant;
};

TypeDNaturals typeD_naturals(const BaseModel& base, double gamma);
/// Carrier term c(y) of the base, normalised so that c(0) = 0.
double exp_family_log_carrier(const BaseModel& base, std::int64_t y);

}  // namespace zinf
