#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "zinf/dataset.hpp"
#include "zinf/likelihood.hpp"

namespace zinf::cli {

enum class Command { Fit, Simulate, Curves, Diagnose, TrajanRepro };

std::string_view to_string(Command command) noexcept;

inline constexpr int kExitOk = 0;
inline constexpr int kExitChecksFailed = 1;  // trajan-repro: a report check did not hold
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitConvergence = 4;

struct RunConfig {
  Command command = Command::Fit;
  std::string input;           // CSV path; empty means the built-in Trajan data where allowed
  std::string out = "out";
  std::string response = "y";
  std::optional<std::string> cell;
  std::vector<std::string> factors;  // columns read as categorical
  std::string zi = "none";
  std::string base = "poisson";
  std::string mean_design;     // empty: saturated in the cell column, or intercept only
  std::string gamma_covariates = "1";
  bool deflation = false;
  std::uint64_t seed = 1;
  // simulate
  std::size_t n = 500;
  std::vector<double> params;
  // curves
  std::optional<double> param;
  std::optional<std::pair<double, double>> through;
  std::size_t grid_points = 512;
  double eps = 1e-4;
  // diagnose
  std::size_t bins = 10;
  std::string scale = "altered";
  // trajan-repro
  unsigned threads = 0;        // 0: one per model
};

/// Executes one command. Errors are reported on `err` as a one-line JSON
/// object; the return value is the process exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// A fit.json read back: the model, its parameters, the stored
/// log-likelihood and the data it was fitted to.
struct StoredFit {
  ModelSpec spec;
  Eigen::VectorXd params;
  double loglik = 0.0;
  CountDataset data;
};

StoredFit load_fit(const std::string& fit_json_path);

/// Parses argv and runs. Usage errors exit with kExitUsage.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace zinf::cli
