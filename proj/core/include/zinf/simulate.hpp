#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "zinf/dataset.hpp"
#include "zinf/likelihood.hpp"
#include "zinf/zi_links.hpp"

namespace zinf {

/// 64-bit Mersenne Twister (std::mt19937_64, whose output sequence is fixed
/// by the standard) with uniforms built from the top 53 bits, so draws are
/// identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Draws from the zero-truncated base distribution by inversion of its CDF,
/// accumulated in log space from y = 1 (or from far below the mean when the
/// mean is large and the pmf is log-concave).
std::int64_t sample_truncated(const BaseModel& base, Rng& rng);

/// One draw from an altered model: zero with probability pit0, otherwise a
/// zero-truncated base draw.
std::int64_t sample_zi(const ZiModel& model, Rng& rng);

struct SimPlan {
  ModelSpec spec;
  Eigen::VectorXd true_params;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  /// Covariate rows used by the designs; row i of the output takes row
  /// i mod the template row count. May be empty for intercept-only designs.
  CountDataset covariates;
};

CountDataset simulate(const SimPlan& plan);

}  // namespace zinf
