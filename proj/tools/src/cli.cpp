#include "zinf_cli/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "zinf/diagnostics.hpp"
#include "zinf/errors.hpp"
#include "zinf/fit.hpp"
#include "zinf/simulate.hpp"
#include "zinf/version.hpp"

namespace zinf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;
constexpr double kTrajanP0 = 0.237;

// Thrown for bad flag values discovered after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonConvergence:
    case ErrorKind::NonFinite:
    case ErrorKind::SingularHessian:
      return kExitConvergence;
    case ErrorKind::InvalidParameter:
    case ErrorKind::Domain:
    case ErrorKind::Infeasible:
    case ErrorKind::NoSolution:
    case ErrorKind::Unsupported:
      return kExitUsage;
    default:
      return kExitData;
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

std::string slug(std::string s) {
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

json config_json(const RunConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  j["input"] = c.input;
  j["out"] = c.out;
  j["response"] = c.response;
  j["cell"] = c.cell ? json(*c.cell) : json(nullptr);
  j["factors"] = c.factors;
  j["zi"] = c.zi;
  j["base"] = c.base;
  j["mean_design"] = c.mean_design;
  j["gamma_covariates"] = c.gamma_covariates;
  j["deflation"] = c.deflation;
  j["seed"] = c.seed;
  j["n"] = c.n;
  j["params"] = c.params;
  j["param"] = c.param ? json(*c.param) : json(nullptr);
  j["through"] = c.through ? json::array({c.through->first, c.through->second}) : json(nullptr);
  j["grid_points"] = c.grid_points;
  j["eps"] = c.eps;
  j["bins"] = c.bins;
  j["scale"] = c.scale;
  j["threads"] = c.threads;
  return j;
}

json spec_json(const ModelSpec& s) {
  return {{"label", model_label(s)},
          {"base", std::string(to_string(s.base))},
          {"zi", std::string(to_string(s.zi))},
          {"mean_design", to_string(s.mean_design)},
          {"gamma_design", to_string(s.gamma_design)},
          {"phi_mode", s.phi_mode == PhiMode::Free ? "free" : "fixed"},
          {"phi_fixed", s.phi_fixed},
          {"type_c_deflation", s.type_c_deflation}};
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec s;
  s.base = parse_family(j.at("base").get<std::string>());
  s.zi = parse_zi_type(j.at("zi").get<std::string>());
  s.mean_design = parse_design(j.at("mean_design").get<std::string>());
  s.gamma_design = parse_design(j.at("gamma_design").get<std::string>());
  s.phi_mode = j.at("phi_mode").get<std::string>() == "fixed" ? PhiMode::Fixed : PhiMode::Free;
  s.phi_fixed = j.at("phi_fixed").get<double>();
  s.type_c_deflation = j.at("type_c_deflation").get<bool>();
  return s;
}

json cells_json(const std::vector<CellFit>& cells) {
  json a = json::array();
  for (const CellFit& c : cells)
    a.push_back({{"cell", c.cell},
                 {"n", c.n},
                 {"observed_mean", c.observed_mean},
                 {"fitted_mean", c.fitted_mean},
                 {"observed_p0", c.observed_p0},
                 {"fitted_pit0", c.fitted_pit0},
                 {"fitted_lambda", c.fitted_lambda},
                 {"fitted_pi0", c.fitted_pi0}});
  return a;
}

json fit_json(const FitResult& f) {
  json j;
  j["model"] = spec_json(f.spec);
  j["param_names"] = f.param_names;
  j["params"] = std::vector<double>(f.params.data(), f.params.data() + f.params.size());
  j["loglik"] = f.loglik_value;
  j["aic"] = f.aic;
  j["converged"] = f.converged;
  j["iterations"] = f.iterations;
  j["warnings"] = f.warnings;
  if (f.vcov) {
    const Eigen::VectorXd se = f.standard_errors();
    j["standard_errors"] = std::vector<double>(se.data(), se.data() + se.size());
    json v = json::array();
    for (Eigen::Index r = 0; r < f.vcov->rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(f.vcov->cols()));
      for (Eigen::Index c = 0; c < f.vcov->cols(); ++c) row[static_cast<std::size_t>(c)] = (*f.vcov)(r, c);
      v.push_back(row);
    }
    j["vcov"] = v;
  } else {
    j["standard_errors"] = nullptr;
    j["vcov"] = nullptr;
  }
  return j;
}

struct Loaded {
  CountDataset data;
  std::string source;
};

bool uses_builtin(const RunConfig& c) { return c.input.empty(); }

CsvSchema schema_for(const RunConfig& c) {
  CsvSchema s;
  s.response = c.response;
  s.factors = c.factors;
  s.cell = c.cell;
  return s;
}

Loaded load_data(const RunConfig& c) {
  if (uses_builtin(c)) {
    CountDataset d = trajan_dataset();
    if (c.cell && *c.cell != d.cell_column) {
      d.add_column(categorical_view(d, *c.cell));
      d.cell_column = *c.cell;
    }
    return {std::move(d), "builtin:trajan"};
  }
  return {read_csv(c.input, schema_for(c)), fs::absolute(c.input).string()};
}

ModelSpec spec_from_config(const RunConfig& c, const CountDataset* data) {
  ModelSpec s;
  s.base = parse_family(c.base);
  s.zi = parse_zi_type(c.zi);
  if (!c.mean_design.empty()) s.mean_design = parse_design(c.mean_design);
  else if (data && data->cell_column) s.mean_design = DesignSpec::saturated(*data->cell_column);
  else s.mean_design = DesignSpec::constant();
  s.gamma_design = parse_design(c.gamma_covariates);
  s.type_c_deflation = c.deflation;
  return s;
}

struct Outputs {
  fs::path dir;
  std::vector<std::string> files;

  void write(const std::string& name, const std::string& text) {
    write_file(dir / name, text);
    files.push_back(name);
  }
};

double gamma_hat(const FitResult& f, const CountDataset& data) {
  const Likelihood lik(f.spec, data);
  const Eigen::VectorXd g = lik.gammas(f.params);
  return g.size() > 0 ? g[0] : 0.0;
}

// ---- commands ----

void cmd_fit(const RunConfig& c, Outputs& out, std::ostream& os) {
  Loaded in = load_data(c);
  const ModelSpec spec = spec_from_config(c, &in.data);
  FitOptions opts;
  opts.seed = c.seed;
  const FitResult f = fit_mle(spec, in.data, opts);
  json j;
  j["schema_version"] = kSchemaVersion;
  j["zinf_version"] = std::string(version());
  j["data"] = {{"input", in.source},
               {"response", in.data.response_name},
               {"factors", c.factors},
               {"cell", in.data.cell_column ? json(*in.data.cell_column) : json(nullptr)},
               {"n", in.data.size()}};
  j.update(fit_json(f));
  if (in.data.cell_column) j["cells"] = cells_json(fitted_vs_observed(f, in.data, *in.data.cell_column));
  out.write("fit.json", j.dump(2) + "\n");
  os << model_label(spec) << ": loglik " << format_number(f.loglik_value) << ", AIC " << format_number(f.aic)
     << "\n";
}

void cmd_simulate(const RunConfig& c, Outputs& out, std::ostream& os) {
  SimPlan plan;
  if (!c.input.empty()) plan.covariates = read_csv(c.input, schema_for(c));
  plan.covariates.response_name = c.response;
  plan.spec = spec_from_config(c, c.input.empty() ? nullptr : &plan.covariates);
  plan.n = c.n;
  plan.seed = c.seed;
  plan.true_params = Eigen::Map<const Eigen::VectorXd>(c.params.data(), static_cast<Eigen::Index>(c.params.size()));
  const CountDataset sim = simulate(plan);
  out.write("dataset.csv", to_csv(sim));
  os << "simulated " << sim.size() << " rows from " << model_label(plan.spec) << "\n";
}

std::vector<CurveTable> matched_curves(double pi0, double pit0, const GridSpec& grid) {
  std::vector<CurveTable> curves;
  for (ZiType t : {ZiType::A, ZiType::B, ZiType::C, ZiType::D}) {
    const double g = zi_gamma_from_point(t, pi0, pit0);
    curves.push_back(zero_curve("type " + std::string(to_string(t)), t, g, grid));
  }
  for (Family fam : {Family::NBlin, Family::NBquad}) {
    const double phi = match_dispersion_through_point(fam, pi0, pit0);
    curves.push_back(zero_curve(std::string(to_string(fam)), fam, phi, grid));
  }
  return curves;
}

void cmd_curves(const RunConfig& c, Outputs& out, std::ostream& os) {
  const GridSpec grid{c.grid_points, c.eps};
  std::vector<CurveTable> curves;
  if (c.param) {
    const ZiType zi = parse_zi_type(c.zi);
    const Family fam = parse_family(c.base);
    if (zi != ZiType::None) curves.push_back(zero_curve("type " + std::string(to_string(zi)), zi, *c.param, grid));
    else if (fam != Family::Poisson) curves.push_back(zero_curve(std::string(to_string(fam)), fam, *c.param, grid));
    else throw UsageError("--param needs --zi a|b|c|d or --base nbquad|nblin");
  } else {
    const auto [x, y] = c.through.value_or(std::pair{0.2, 0.4});
    curves = matched_curves(x, y, grid);
  }
  for (const CurveTable& t : curves) out.write("curve_" + slug(t.label) + ".csv", curve_csv(t));
  out.write("curves.svg", curves_svg("Zero probability curves", curves, true));
  os << "wrote " << curves.size() << " curve(s)\n";
}

void cmd_diagnose(const RunConfig& c, Outputs& out, std::ostream& os) {
  Loaded in = load_data(c);
  const ModelSpec spec = spec_from_config(c, &in.data);
  FitOptions opts;
  opts.seed = c.seed;
  const FitResult f = fit_mle(spec, in.data, opts);
  const ZeroScale scale = c.scale == "base" ? ZeroScale::Base : ZeroScale::Altered;
  const ZeroDiagnostic d = empirical_zero_diagnostic(f, in.data, c.bins, scale);
  out.write("zero_diagnostic.csv", zero_diagnostic_csv(d));
  json j;
  j["schema_version"] = kSchemaVersion;
  j["model"] = spec_json(spec);
  j["loglik"] = f.loglik_value;
  j["scale"] = c.scale;
  j["bins"] = d.bins.size();
  j["max_abs_deviation"] = d.max_abs_deviation;
  j["max_abs_z"] = d.max_abs_z;
  j["excess_zero_evidence"] = d.max_abs_z > 3.0;
  out.write("diagnose.json", j.dump(2) + "\n");
  if (in.data.cell_column)
    out.write("fitted_vs_observed.csv", fitted_vs_observed_csv(fitted_vs_observed(f, in.data, *in.data.cell_column)));
  os << model_label(spec) << ": max |z| " << format_number(d.max_abs_z) << " over " << d.bins.size() << " bins\n";
}

// ---- trajan-repro ----

struct Check {
  std::string name;
  bool passed;
  std::string detail;
};

double max_rel_mean_error(const std::vector<CellFit>& cells) {
  double m = 0.0;
  for (const CellFit& c : cells) m = std::max(m, std::abs(c.fitted_mean - c.observed_mean) / c.observed_mean);
  return m;
}

std::string sci(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << std::scientific << v;
  return s.str();
}

std::vector<FitResult> fit_all(const std::vector<ModelSpec>& specs, const CountDataset& data, std::uint64_t seed,
                               unsigned threads) {
  std::vector<std::optional<FitResult>> results(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        FitOptions opts;
        opts.seed = seed;
        results[i] = fit_mle(specs[i], data, opts);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = threads == 0 ? static_cast<unsigned>(specs.size()) : threads;
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  std::vector<FitResult> out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*results[i]));
  }
  return out;
}

int cmd_trajan_repro(const RunConfig& c, Outputs& out, std::ostream& os) {
  RunConfig rc = c;
  if (uses_builtin(rc) && !rc.cell) rc.cell = std::string(kTrajanCell);
  if (!rc.cell) throw UsageError("trajan-repro needs --cell with --input");
  Loaded in = load_data(rc);
  const CountDataset& data = in.data;
  const std::string cell = *rc.cell;

  std::vector<ModelSpec> specs;
  const std::vector<std::pair<Family, ZiType>> models{
      {Family::Poisson, ZiType::None}, {Family::NBquad, ZiType::None}, {Family::NBlin, ZiType::None},
      {Family::Poisson, ZiType::A},    {Family::Poisson, ZiType::B},   {Family::Poisson, ZiType::C},
      {Family::Poisson, ZiType::D}};
  for (const auto& [fam, zi] : models) {
    ModelSpec s;
    s.base = fam;
    s.zi = zi;
    s.mean_design = DesignSpec::saturated(cell);
    specs.push_back(s);
  }
  const std::vector<FitResult> fits = fit_all(specs, data, rc.seed, rc.threads);
  std::vector<std::string> labels;
  std::vector<ModelCells> cells;
  for (const FitResult& f : fits) {
    labels.push_back(model_label(f.spec));
    cells.push_back({labels.back(), fitted_vs_observed(f, data, cell)});
  }
  const auto index_of = [&](const std::string& label) {
    return static_cast<std::size_t>(std::find(labels.begin(), labels.end(), label) - labels.begin());
  };

  const CellSummaryTable summary = cell_summaries(data, cell);
  std::vector<Check> checks;
  {
    const double dev = std::abs(summary.overall_p0 - kTrajanP0);
    checks.push_back({"fixture_zero_proportion", dev <= 0.002,
                      "overall p0 " + format_number(summary.overall_p0) + " vs 0.237 (tolerance 0.002)"});
  }
  for (const char* m : {"poisson", "nbquad", "poisson+D"}) {
    const double e = max_rel_mean_error(cells[index_of(m)].cells);
    checks.push_back({std::string("cell_means_reproduced:") + m, e <= 1e-6, "max relative error " + sci(e)});
  }
  for (const char* m : {"nblin", "poisson+A", "poisson+B", "poisson+C"}) {
    const double e = max_rel_mean_error(cells[index_of(m)].cells);
    checks.push_back({std::string("cell_means_not_reproduced:") + m, e > 1e-4, "max relative error " + sci(e)});
  }
  const FitResult& fa = fits[index_of("poisson+A")];
  {
    double p0 = 0.0;
    for (double v : fa.fitted_pit0) p0 += v;
    p0 /= static_cast<double>(fa.fitted_pit0.size());
    checks.push_back({"type_a_zero_proportion", std::abs(p0 - kTrajanP0) <= 0.002,
                      "fitted zero proportion " + format_number(p0) + " vs 0.237 (tolerance 0.002)"});
  }
  {
    double worst = 0.0;
    const std::vector<CellFit>& ca = cells[index_of("poisson+A")].cells;
    for (std::size_t k = 0; k < ca.size(); ++k) {
      const double target = (1.0 - summary.overall_p0) * summary.cells[k].trunc_mean;
      worst = std::max(worst, std::abs(ca[k].fitted_mean - target) / target);
    }
    checks.push_back({"type_a_mean_is_scaled_truncated_mean", worst <= 1e-6, "max relative error " + sci(worst)});
  }
  {
    const FitResult closed = fit_type_a_twopart(data, cell);
    const double d = std::abs(closed.loglik_value - fa.loglik_value);
    checks.push_back({"type_a_closed_form_matches_optimizer", d <= 1e-6, "loglik difference " + sci(d)});
  }
  {
    bool all = true;
    for (const FitResult& f : fits) all = all && f.converged;
    checks.push_back({"all_fits_converged", all, all ? "7 of 7" : "at least one fit did not converge"});
  }
  const ZeroDiagnostic diag = empirical_zero_diagnostic(fits[index_of("poisson")], data, 4, ZeroScale::Base);
  checks.push_back({"poisson_excess_zero_evidence", diag.max_abs_z > 3.0, "max |z| " + format_number(diag.max_abs_z)});

  // plots
  out.write("fitted_vs_observed.svg", fitted_vs_observed_svg("Fitted versus observed by cell", cells));
  for (const ModelCells& m : cells) out.write("fitted_vs_observed_" + slug(m.label) + ".csv", fitted_vs_observed_csv(m.cells));
  std::vector<CurveTable> model_curves;
  for (const FitResult& f : fits) {
    const std::string label = model_label(f.spec);
    auto pts = overlay_points(f, data, cell);
    if (f.spec.zi != ZiType::None)
      model_curves.push_back(zero_curve(label, f.spec.zi, gamma_hat(f, data), {}, std::move(pts)));
    else
      model_curves.push_back(zero_curve(label, f.spec.base, f.spec.base == Family::Poisson ? 0.0 : f.phi(), {}, std::move(pts)));
  }
  for (const CurveTable& t : model_curves) out.write("model_curve_" + slug(t.label) + ".csv", curve_csv(t));
  out.write("model_curves.svg", curves_svg("Altered against base zero probability", model_curves, false));
  const std::vector<CurveTable> matched = matched_curves(0.2, 0.4, {});
  for (const CurveTable& t : matched) out.write("matched_curve_" + slug(t.label) + ".csv", curve_csv(t));
  out.write("matched_curves.svg", curves_svg("Curves through (0.2, 0.4)", matched, true));
  const std::vector<AicRow> aic = aic_table(fits, labels);
  out.write("aic.csv", aic_csv(aic));
  out.write("zero_diagnostic_poisson.csv", zero_diagnostic_csv(diag));

  bool ok = true;
  for (const Check& ch : checks) ok = ok && ch.passed;

  json j;
  j["schema_version"] = kSchemaVersion;
  j["zinf_version"] = std::string(version());
  j["data"] = {{"input", in.source}, {"cell", cell}, {"n", data.size()}, {"overall_p0", summary.overall_p0}};
  j["passed"] = ok;
  j["checks"] = json::array();
  for (const Check& ch : checks) j["checks"].push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
  j["models"] = json::array();
  for (std::size_t i = 0; i < fits.size(); ++i) {
    json m = fit_json(fits[i]);
    m["cells"] = cells_json(cells[i].cells);
    j["models"].push_back(std::move(m));
  }
  j["aic"] = json::array();
  for (const AicRow& r : aic)
    j["aic"].push_back({{"model", r.label}, {"n_params", r.n_params}, {"loglik", r.loglik}, {"aic", r.aic},
                        {"delta_aic", r.delta_aic}});
  j["model_curves_x_axis"] =
      "points use exp(-lambda-hat) from each model's own fit; for the hurdle this lambda comes from the truncated cell mean";
  out.write("report.json", j.dump(2) + "\n");

  std::ostringstream txt;
  txt << "Trajan reproduction (" << data.size() << " rows, overall p0 " << format_number(summary.overall_p0) << ")\n\n";
  for (const Check& ch : checks) txt << (ch.passed ? "PASS " : "FAIL ") << ch.name << ": " << ch.detail << "\n";
  txt << "\nmodel            k    loglik        AIC     dAIC\n";
  for (const AicRow& r : aic) {
    char line[128];
    std::snprintf(line, sizeof line, "%-14s %3zu %10.3f %10.3f %8.3f\n", r.label.c_str(), r.n_params, r.loglik, r.aic,
                  r.delta_aic);
    txt << line;
  }
  out.write("report.txt", txt.str());
  os << txt.str();
  return ok ? kExitOk : kExitChecksFailed;
}

void write_manifest(const RunConfig& c, const Outputs& out, int status) {
  json m;
  m["schema_version"] = kSchemaVersion;
  m["zinf_version"] = std::string(version());
  m["config"] = config_json(c);
  m["exit_status"] = status;
  m["outputs"] = out.files;
  write_file(out.dir / "manifest.json", m.dump(2) + "\n");
}

json error_json(const std::string& kind, const std::string& message, int code) {
  return {{"error", {{"kind", kind}, {"message", message}, {"exit_status", code}}}};
}

}  // namespace

std::string_view to_string(Command command) noexcept {
  switch (command) {
    case Command::Fit: return "fit";
    case Command::Simulate: return "simulate";
    case Command::Curves: return "curves";
    case Command::Diagnose: return "diagnose";
    case Command::TrajanRepro: return "trajan-repro";
  }
  return "?";
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Outputs files;
  files.dir = config.out;
  int status = kExitOk;
  json error;
  try {
    fs::create_directories(files.dir);
  } catch (const std::exception& e) {
    err << error_json("io", e.what(), kExitData).dump() << std::endl;
    return kExitData;
  }
  try {
    switch (config.command) {
      case Command::Fit: cmd_fit(config, files, out); break;
      case Command::Simulate: cmd_simulate(config, files, out); break;
      case Command::Curves: cmd_curves(config, files, out); break;
      case Command::Diagnose: cmd_diagnose(config, files, out); break;
      case Command::TrajanRepro: status = cmd_trajan_repro(config, files, out); break;
    }
  } catch (const NonConvergenceError& e) {
    status = kExitConvergence;
    error = error_json("non_convergence", e.what(), status);
    error["error"]["best_loglik"] = e.best().loglik_value;
  } catch (const ParseError& e) {
    status = kExitData;
    error = error_json("parse", e.what(), status);
    error["error"]["row"] = e.row();
    error["error"]["column"] = e.column();
  } catch (const Error& e) {
    status = exit_code_for(e.kind());
    error = error_json(std::string(zinf::to_string(e.kind())), e.what(), status);
  } catch (const UsageError& e) {
    status = kExitUsage;
    error = error_json("usage", e.what(), status);
  } catch (const std::exception& e) {
    status = kExitData;
    error = error_json("internal", e.what(), status);
  }
  if (!error.is_null()) err << error.dump() << std::endl;
  try {
    write_manifest(config, files, status);
  } catch (const std::exception& e) {
    err << error_json("io", e.what(), kExitData).dump() << std::endl;
    if (status == kExitOk) status = kExitData;
  }
  return status;
}

StoredFit load_fit(const std::string& fit_json_path) {
  std::ifstream f(fit_json_path);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + fit_json_path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, fit_json_path + ": " + e.what());
  }
  StoredFit s;
  s.spec = spec_from_json(j.at("model"));
  const auto p = j.at("params").get<std::vector<double>>();
  s.params = Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
  s.loglik = j.at("loglik").get<double>();
  const json& d = j.at("data");
  const std::string input = d.at("input").get<std::string>();
  if (input == "builtin:trajan") {
    s.data = trajan_dataset();
  } else {
    CsvSchema schema;
    schema.response = d.at("response").get<std::string>();
    schema.factors = d.at("factors").get<std::vector<std::string>>();
    if (!d.at("cell").is_null()) schema.cell = d.at("cell").get<std::string>();
    s.data = read_csv(input, schema);
  }
  return s;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero-inflated count regression: fitting, simulation and zero diagnostics", "zinf"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  RunConfig cfg;
  std::vector<double> through;

  const auto add_model = [&](CLI::App* sub) {
    sub->add_option("--zi", cfg.zi, "Zero-inflation type")
        ->check(CLI::IsMember({"none", "a", "b", "c", "d"}, CLI::ignore_case))
        ->capture_default_str();
    sub->add_option("--base", cfg.base, "Base distribution")
        ->check(CLI::IsMember({"poisson", "nbquad", "nblin"}, CLI::ignore_case))
        ->capture_default_str();
    sub->add_option("--mean-design", cfg.mean_design,
                    "Mean design, e.g. \"1 + f + num(x)\"; default saturated in --cell");
    sub->add_option("--gamma-covariates", cfg.gamma_covariates, "Design for gamma")->capture_default_str();
    sub->add_flag("--deflation", cfg.deflation, "Allow zero deflation for type c");
  };
  const auto add_data = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "CSV input (default: bundled Trajan data)");
    sub->add_option("--response", cfg.response, "Response column")->capture_default_str();
    sub->add_option("--cell", cfg.cell, "Cell column or a:b interaction");
    sub->add_option("--factor", cfg.factors, "Column to read as categorical (repeatable)");
  };
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  };

  CLI::App* fit = app.add_subcommand("fit", "Fit a model by maximum likelihood");
  add_data(fit), add_model(fit), add_common(fit);
  CLI::App* sim = app.add_subcommand("simulate", "Simulate a dataset from a model");
  add_data(sim), add_model(sim), add_common(sim);
  sim->add_option("--n", cfg.n, "Rows to simulate")->capture_default_str();
  sim->add_option("--params", cfg.params, "Parameter vector, comma separated")->delimiter(',')->required();
  CLI::App* curves = app.add_subcommand("curves", "Tabulate and plot zero-probability curves");
  add_model(curves), add_common(curves);
  curves->add_option("--param", cfg.param, "gamma for --zi, phi for --base");
  curves->add_option("--through", through, "pi0,pit0 point to match all curves through")->delimiter(',')->expected(2);
  curves->add_option("--grid-points", cfg.grid_points)->capture_default_str();
  curves->add_option("--eps", cfg.eps)->capture_default_str();
  CLI::App* diag = app.add_subcommand("diagnose", "Binned empirical zero diagnostic");
  add_data(diag), add_model(diag), add_common(diag);
  diag->add_option("--bins", cfg.bins)->capture_default_str();
  diag->add_option("--scale", cfg.scale)->check(CLI::IsMember({"altered", "base"}))->capture_default_str();
  CLI::App* repro = app.add_subcommand("trajan-repro", "Fit the seven Trajan models and write the report");
  add_data(repro), add_common(repro);
  repro->add_option("--threads", cfg.threads, "Worker threads (0: one per model)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << error_json("usage", e.what(), kExitUsage).dump() << std::endl;
    return kExitUsage;
  }
  std::transform(cfg.zi.begin(), cfg.zi.end(), cfg.zi.begin(), [](unsigned char ch) { return std::tolower(ch); });
  std::transform(cfg.base.begin(), cfg.base.end(), cfg.base.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (!through.empty()) cfg.through = std::pair{through[0], through[1]};
  if (fit->parsed()) cfg.command = Command::Fit;
  else if (sim->parsed()) cfg.command = Command::Simulate;
  else if (curves->parsed()) cfg.command = Command::Curves;
  else if (diag->parsed()) cfg.command = Command::Diagnose;
  else cfg.command = Command::TrajanRepro;
  return run(cfg, out, err);
}

}  // namespace zinf::cli
