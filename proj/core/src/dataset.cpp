#include "zinf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "zinf/errors.hpp"

namespace zinf {
namespace {

std::vector<std::string> split_line(std::string_view line, std::size_t row) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ParseError(row, "", "unterminated quote on row " + std::to_string(row));
  out.push_back(std::move(field));
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

bool CountDataset::has_column(std::string_view name) const noexcept {
  return std::any_of(covariates.begin(), covariates.end(),
                     [&](const Column& c) { return c.name == name; });
}

const Column& CountDataset::column(std::string_view name) const {
  for (const auto& c : covariates)
    if (c.name == name) return c;
  throw Error(ErrorKind::MissingColumn, "no column named '" + std::string(name) + "'");
}

void CountDataset::add_numeric(std::string name, std::vector<double> values) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Numeric;
  c.values = std::move(values);
  add_column(std::move(c));
}

void CountDataset::add_categorical(std::string name, const std::vector<std::string>& labels) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Categorical;
  std::unordered_map<std::string, std::size_t> index;
  c.codes.reserve(labels.size());
  for (const auto& l : labels) {
    auto [it, inserted] = index.emplace(l, c.levels.size());
    if (inserted) c.levels.push_back(l);
    c.codes.push_back(it->second);
  }
  add_column(std::move(c));
}

void CountDataset::add_column(Column column) {
  if (has_column(column.name))
    throw Error(ErrorKind::InvalidParameter, "duplicate column '" + column.name + "'");
  if (!y.empty() && column.size() != y.size())
    throw Error(ErrorKind::DimensionMismatch, "column '" + column.name + "' has " + std::to_string(column.size()) +
                                                  " rows, expected " + std::to_string(y.size()));
  covariates.push_back(std::move(column));
}

void CountDataset::validate() const {
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] < 0)
      throw Error(ErrorKind::NegativeCount, "negative count at row " + std::to_string(i + 1));
  for (const auto& c : covariates)
    if (c.size() != y.size())
      throw Error(ErrorKind::DimensionMismatch,
                  "column '" + c.name + "' has " + std::to_string(c.size()) + " rows, expected " +
                      std::to_string(y.size()));
  if (cell_column && !has_column(*cell_column))
    throw Error(ErrorKind::MissingColumn, "cell column '" + *cell_column + "' not present");
}

CountDataset CountDataset::permuted(std::span<const std::size_t> order) const {
  if (order.size() != size())
    throw Error(ErrorKind::DimensionMismatch, "permutation length differs from dataset size");
  CountDataset out;
  out.response_name = response_name;
  out.cell_column = cell_column;
  out.y.reserve(size());
  for (std::size_t i : order) out.y.push_back(y.at(i));
  for (const auto& c : covariates) {
    Column p = c;
    if (c.kind == ColumnKind::Numeric) {
      for (std::size_t i = 0; i < order.size(); ++i) p.values[i] = c.values.at(order[i]);
    } else {
      for (std::size_t i = 0; i < order.size(); ++i) p.codes[i] = c.codes.at(order[i]);
    }
    out.covariates.push_back(std::move(p));
  }
  return out;
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

Column categorical_view(const CountDataset& data, std::string_view name) {
  if (data.has_column(name)) {
    const Column& c = data.column(name);
    if (c.kind == ColumnKind::Categorical) return c;
    std::vector<std::string> labels;
    labels.reserve(c.values.size());
    for (double v : c.values) labels.push_back(format_number(v));
    CountDataset tmp;
    tmp.add_categorical(std::string(name), labels);
    return tmp.covariates.front();
  }
  const auto colon = name.find(':');
  if (colon == std::string_view::npos)
    throw Error(ErrorKind::MissingColumn, "no column named '" + std::string(name) + "'");
  std::vector<Column> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = name.find(':', start);
    parts.push_back(categorical_view(data, name.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  std::vector<std::string> labels(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::string l;
    for (std::size_t p = 0; p < parts.size(); ++p) {
      if (p) l.push_back(':');
      l += parts[p].label(i);
    }
    labels[i] = std::move(l);
  }
  CountDataset tmp;
  tmp.add_categorical(std::string(name), labels);
  return tmp.covariates.front();
}

CountDataset parse_csv(std::string_view text, const CsvSchema& schema) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ParseError(1, "", "missing header row");

  std::string_view header_line = lines.front();
  if (header_line.size() >= 3 && header_line.substr(0, 3) == "\xEF\xBB\xBF") header_line.remove_prefix(3);
  const std::vector<std::string> header = split_line(header_line, 1);
  const std::size_t ncol = header.size();
  const auto resp_it = std::find(header.begin(), header.end(), schema.response);
  if (resp_it == header.end())
    throw Error(ErrorKind::MissingColumn, "response column '" + schema.response + "' not in header");
  const std::size_t resp = static_cast<std::size_t>(resp_it - header.begin());
  for (const auto& f : schema.factors)
    if (std::find(header.begin(), header.end(), f) == header.end())
      throw Error(ErrorKind::MissingColumn, "factor column '" + f + "' not in header");

  std::vector<std::vector<std::string>> cells(ncol);
  CountDataset out;
  out.response_name = schema.response;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::size_t row = r + 1;
    if (lines[r].empty()) throw ParseError(row, "", "empty line at row " + std::to_string(row));
    auto fields = split_line(lines[r], row);
    if (fields.size() != ncol)
      throw ParseError(row, "",
                       "row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                           " fields, header has " + std::to_string(ncol));
    const std::string& ytext = fields[resp];
    std::int64_t yv = 0;
    auto [ptr, ec] = std::from_chars(ytext.data(), ytext.data() + ytext.size(), yv);
    if (ec != std::errc() || ptr != ytext.data() + ytext.size() || ytext.empty())
      throw ParseError(row, schema.response,
                       "row " + std::to_string(row) + ", column '" + schema.response +
                           "': expected a non-negative integer, got '" + ytext + "'");
    if (yv < 0)
      throw Error(ErrorKind::NegativeCount, "row " + std::to_string(row) + ", column '" +
                                                schema.response + "': negative count " + ytext);
    out.y.push_back(yv);
    for (std::size_t c = 0; c < ncol; ++c) cells[c].push_back(std::move(fields[c]));
  }

  for (std::size_t c = 0; c < ncol; ++c) {
    if (c == resp) continue;
    const bool forced = std::find(schema.factors.begin(), schema.factors.end(), header[c]) !=
                        schema.factors.end();
    std::vector<double> nums;
    bool numeric = !forced;
    if (numeric) {
      nums.reserve(cells[c].size());
      for (const auto& s : cells[c]) {
        double v = 0.0;
        if (!parse_double(s, v)) {
          numeric = false;
          break;
        }
        nums.push_back(v);
      }
    }
    if (numeric)
      out.add_numeric(header[c], std::move(nums));
    else
      out.add_categorical(header[c], cells[c]);
  }
  if (schema.cell) {
    if (!out.has_column(*schema.cell)) out.add_column(categorical_view(out, *schema.cell));
    out.cell_column = *schema.cell;
  }
  out.validate();
  return out;
}

CountDataset read_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), schema);
}

std::string to_csv(const CountDataset& data) {
  std::vector<const Column*> cols;
  for (const auto& c : data.covariates)
    if (c.name.find(':') == std::string::npos) cols.push_back(&c);
  std::string out = quote_if_needed(data.response_name);
  for (const auto* c : cols) out += "," + quote_if_needed(c->name);
  out += "\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += std::to_string(data.y[i]);
    for (const auto* c : cols) {
      out.push_back(',');
      out += c->kind == ColumnKind::Numeric ? format_number(c->values[i]) : quote_if_needed(c->label(i));
    }
    out += "\n";
  }
  return out;
}

void write_csv(const std::string& path, const CountDataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << to_csv(data);
}

CellSummaryTable cell_summaries(const CountDataset& data, std::string_view cell_column) {
  const Column cells = categorical_view(data, cell_column);
  CellSummaryTable table;
  table.cells.resize(cells.levels.size());
  std::vector<double> sums(cells.levels.size(), 0.0);
  for (std::size_t k = 0; k < cells.levels.size(); ++k) table.cells[k].cell = cells.levels[k];
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto& s = table.cells[cells.codes[i]];
    ++s.n;
    if (data.y[i] == 0) ++s.n_zero;
    sums[cells.codes[i]] += static_cast<double>(data.y[i]);
  }
  for (std::size_t k = 0; k < table.cells.size(); ++k) {
    auto& s = table.cells[k];
    zeros += s.n_zero;
    s.mean = sums[k] / static_cast<double>(s.n);
    s.zero_prop = static_cast<double>(s.n_zero) / static_cast<double>(s.n);
    s.trunc_mean = s.n_zero < s.n ? sums[k] / static_cast<double>(s.n - s.n_zero) : 0.0;
  }
  table.overall_p0 = data.empty() ? 0.0 : static_cast<double>(zeros) / static_cast<double>(data.size());
  return table;
}

}  // namespace zinf
