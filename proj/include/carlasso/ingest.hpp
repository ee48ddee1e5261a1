#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "carlasso/formula.hpp"
#include "carlasso/types.hpp"

namespace carlasso {

/// Rectangular table of named columns. Numeric columns hold NaN for missing
/// cells; categorical columns hold an empty string for missing cells.
class DataTable {
 public:
  using NumericColumn = std::vector<double>;
  using CategoricalColumn = std::vector<std::string>;
  using Column = std::variant<NumericColumn, CategoricalColumn>;

  DataTable() = default;
  /// Throws DimensionMismatch on unequal lengths, DuplicateName on repeated names.
  DataTable(std::vector<std::string> names, std::vector<Column> columns);

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_cols() const noexcept { return names_.size(); }
  const std::vector<std::string>& column_names() const noexcept { return names_; }
  const Column& column(std::size_t i) const { return columns_.at(i); }
  bool is_numeric(std::size_t i) const {
    return std::holds_alternative<NumericColumn>(columns_.at(i));
  }
  std::optional<std::size_t> find(const std::string& name) const;

 private:
  std::vector<std::string> names_;
  std::vector<Column> columns_;
  std::size_t n_rows_ = 0;
};

/// Comma-separated, RFC-4180 quoting, header row required. A column whose
/// non-missing cells all parse as numbers is numeric, otherwise categorical.
/// Cells that are empty or `NA` are missing. Errors: IoError, EmptyFile,
/// RaggedRow (1-based data row, header excluded).
DataTable read_csv(const std::string& path);
DataTable parse_csv(const std::string& text);

/// Writes the table as RFC-4180 CSV with round-trip exact numbers.
void write_csv(const DataTable& table, const std::string& path);

struct DesignMatrices {
  Matrix y;  ///< n x k, centred under the identity link, raw otherwise
  Matrix x;  ///< n x p_expanded, standardised numeric and centred dummies
  Vector x_means;
  Vector x_scales;     ///< 1 for dummy columns
  Vector y_centering;  ///< column means of Y (identity link), zeros otherwise
  std::vector<std::string> y_labels;
  std::vector<std::string> x_labels;
  std::vector<bool> x_is_dummy;
  /// x column -> formula predictor it came from
  std::vector<std::size_t> x_source;
  LinkCode link = LinkCode::Identity;

  int n() const { return static_cast<int>(y.rows()); }
  int k() const { return static_cast<int>(y.cols()); }
  int p() const { return static_cast<int>(x.cols()); }
};

/// Treatment-codes categorical predictors (alphabetically first level is the
/// dropped reference), standardises numeric predictors to mean 0 and sample
/// sd 1, centres dummies, and checks the responses against the link.
DesignMatrices build_design(const DataTable& table, const BoundFormula& binding, LinkCode link);

/// Undo predictor standardisation (x * scale + mean).
Matrix destandardize(const DesignMatrices& design);

}  // namespace carlasso
