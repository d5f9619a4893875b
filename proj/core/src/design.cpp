#include "zinf/design.hpp"

#include <algorithm>
#include <sstream>

#include "zinf/errors.hpp"

namespace zinf {

DesignMatrix build_design(const DesignSpec& spec, const CountDataset& data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  std::vector<Eigen::VectorXd> cols;
  DesignMatrix out;
  if (spec.intercept) {
    cols.push_back(Eigen::VectorXd::Ones(n));
    out.names.emplace_back("(intercept)");
  }
  bool first_factor_full = !spec.intercept;
  for (const auto& f : spec.factors) {
    const Column c = categorical_view(data, f);
    const std::size_t start = first_factor_full ? 0 : 1;
    first_factor_full = false;
    for (std::size_t level = start; level < c.levels.size(); ++level) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
      for (Eigen::Index i = 0; i < n; ++i)
        if (c.codes[static_cast<std::size_t>(i)] == level) v[i] = 1.0;
      cols.push_back(std::move(v));
      out.names.push_back(f + "[" + c.levels[level] + "]");
    }
  }
  for (const auto& name : spec.numerics) {
    const Column& c = data.column(name);
    if (c.kind != ColumnKind::Numeric)
      throw Error(ErrorKind::InvalidParameter, "column '" + name + "' is not numeric");
    cols.push_back(Eigen::Map<const Eigen::VectorXd>(c.values.data(), n));
    out.names.push_back(name);
  }
  out.x.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.x.col(static_cast<Eigen::Index>(j)) = cols[j];
  return out;
}

std::string to_string(const DesignSpec& spec) {
  std::string out = spec.intercept ? "1" : "0";
  for (const auto& f : spec.factors) out += " + " + f;
  for (const auto& v : spec.numerics) out += " + num(" + v + ")";
  return out;
}

DesignSpec parse_design(const std::string& text) {
  DesignSpec spec;
  spec.intercept = true;
  std::stringstream ss(text);
  std::string term;
  bool first = true;
  while (std::getline(ss, term, '+')) {
    term.erase(0, term.find_first_not_of(" \t"));
    term.erase(term.find_last_not_of(" \t") + 1);
    if (term.empty()) throw Error(ErrorKind::InvalidParameter, "empty term in design '" + text + "'");
    if (term == "1" || term == "0") {
      if (!first) throw Error(ErrorKind::InvalidParameter, "intercept term must come first in '" + text + "'");
      spec.intercept = term == "1";
    } else if (term.rfind("num(", 0) == 0 && term.back() == ')') {
      spec.numerics.push_back(term.substr(4, term.size() - 5));
    } else {
      spec.factors.push_back(term);
    }
    first = false;
  }
  return spec;
}

}  // namespace zinf
