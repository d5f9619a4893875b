#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zinf {

enum class ColumnKind { Numeric, Categorical };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  std::vector<double> values;        // numeric columns
  std::vector<std::size_t> codes;    // categorical columns: level index per row
  std::vector<std::string> levels;   // categorical columns: first-appearance order

  std::size_t size() const noexcept {
    return kind == ColumnKind::Numeric ? values.size() : codes.size();
  }
  const std::string& label(std::size_t row) const { return levels.at(codes.at(row)); }
};

/// Response counts plus named covariate columns. An optional cell column
/// names one of the categorical covariates as the design cell.
class CountDataset {
 public:
  std::string response_name = "y";
  std::vector<std::int64_t> y;
  std::vector<Column> covariates;
  std::optional<std::string> cell_column;

  std::size_t size() const noexcept { return y.size(); }
  bool empty() const noexcept { return y.empty(); }

  bool has_column(std::string_view name) const noexcept;
  /// Throws MissingColumn.
  const Column& column(std::string_view name) const;

  void add_numeric(std::string name, std::vector<double> values);
  void add_categorical(std::string name, const std::vector<std::string>& labels);
  /// Columns must match the number of responses unless there are none yet.
  void add_column(Column column);

  /// Equal column lengths and non-negative counts; throws otherwise.
  void validate() const;

  /// Rows reordered: result row i is this row order[i].
  CountDataset permuted(std::span<const std::size_t> order) const;
};

/// Categorical view of a column; numeric columns are labelled by their
/// shortest round-trip text. "a:b" builds the interaction of a and b.
Column categorical_view(const CountDataset& data, std::string_view name);

/// Shortest decimal text that round-trips the double.
std::string format_number(double value);

struct CsvSchema {
  std::string response = "y";
  /// Columns forced to categorical; other covariates are numeric when every
  /// entry parses as a number.
  std::vector<std::string> factors;
  /// Optional cell column (a column name or an "a:b" interaction), added as a
  /// categorical covariate and recorded as the dataset's cell column.
  std::optional<std::string> cell;
};

/// Comma-separated, header row required, UTF-8, double quotes only around
/// text fields. Throws ParseError with the row/column of the bad cell.
CountDataset parse_csv(std::string_view text, const CsvSchema& schema);
CountDataset read_csv(const std::string& path, const CsvSchema& schema);

/// Response first, then covariates in order. Interaction columns (names
/// containing ':') are skipped since they are derived.
std::string to_csv(const CountDataset& data);
void write_csv(const std::string& path, const CountDataset& data);

struct CellSummary {
  std::string cell;
  std::size_t n = 0;
  std::size_t n_zero = 0;
  double mean = 0.0;
  double zero_prop = 0.0;
  double trunc_mean = 0.0;  // mean of the positive counts; 0 when none
};

struct CellSummaryTable {
  std::vector<CellSummary> cells;  // one per level, first-appearance order
  double overall_p0 = 0.0;
};

CellSummaryTable cell_summaries(const CountDataset& data, std::string_view cell_column);

/// Raw text of the embedded Trajan apple-root fixture (270 rows, columns
/// photoperiod,bap,roots).
std::string trajan_csv();
/// The fixture parsed with photoperiod and bap as factors and cell
/// "photoperiod:bap".
CountDataset trajan_dataset();
inline constexpr std::string_view kTrajanCell = "photoperiod:bap";

}  // namespace zinf
