#include "carlasso/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "carlasso/error.hpp"
#include "text_util.hpp"

namespace carlasso {

namespace {

bool is_missing_token(std::string_view s) {
  s = detail::trim(s);
  return s.empty() || s == "NA";
}

// Splits RFC-4180 text into records of fields. Quoted fields may contain
// commas, doubled quotes and line breaks.
std::vector<std::vector<std::string>> split_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool any = false;  // current record has content
  std::size_t i = 0;
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
  auto end_record = [&] {
    fields.push_back(std::move(field));
    field.clear();
    // Blank lines carry no data.
    if (!(fields.size() == 1 && fields[0].empty() && !any)) records.push_back(std::move(fields));
    fields.clear();
    any = false;
  };
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        any = true;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field += c;
        any = true;
    }
  }
  if (in_quotes) throw Error(ErrorKind::RaggedRow, "unterminated quoted field").at_row(records.size());
  if (any || !field.empty() || !fields.empty()) end_record();
  return records;
}

std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string_view to_string(LinkCode link) {
  switch (link) {
    case LinkCode::Identity: return "identity";
    case LinkCode::Probit: return "probit";
    case LinkCode::Log: return "log";
    case LinkCode::Logit: return "logit";
  }
  return "identity";
}

std::optional<LinkCode> parse_link(std::string_view text) {
  if (text == "identity") return LinkCode::Identity;
  if (text == "probit") return LinkCode::Probit;
  if (text == "log") return LinkCode::Log;
  if (text == "logit") return LinkCode::Logit;
  return std::nullopt;
}

DataTable::DataTable(std::vector<std::string> names, std::vector<Column> columns)
    : names_(std::move(names)), columns_(std::move(columns)) {
  if (names_.size() != columns_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "column name count differs from column count");
  }
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) throw Error(ErrorKind::DuplicateName, "duplicate column name").in_column(n);
  }
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    std::size_t len = std::visit([](const auto& c) { return c.size(); }, columns_[j]);
    if (j == 0) n_rows_ = len;
    if (len != n_rows_) {
      throw Error(ErrorKind::DimensionMismatch, "columns have unequal lengths").in_column(names_[j]);
    }
  }
}

std::optional<std::size_t> DataTable::find(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

DataTable parse_csv(const std::string& text) {
  auto records = split_records(text);
  if (records.empty()) throw Error(ErrorKind::EmptyFile, "no header row");
  std::vector<std::string> names;
  for (auto& h : records[0]) names.emplace_back(detail::trim(h));
  const std::size_t ncol = names.size();
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != ncol) {
      throw Error(ErrorKind::RaggedRow, "row has " + std::to_string(records[r].size()) +
                                            " fields, header has " + std::to_string(ncol))
          .at_row(r);
    }
  }
  const std::size_t nrow = records.size() - 1;
  std::vector<DataTable::Column> columns;
  columns.reserve(ncol);
  for (std::size_t j = 0; j < ncol; ++j) {
    std::vector<double> numeric(nrow);
    bool all_numeric = true;
    for (std::size_t r = 0; r < nrow && all_numeric; ++r) {
      const std::string& cell = records[r + 1][j];
      if (is_missing_token(cell)) {
        numeric[r] = std::nan("");
      } else if (auto v = detail::parse_double(cell)) {
        numeric[r] = *v;
      } else {
        all_numeric = false;
      }
    }
    if (all_numeric) {
      columns.emplace_back(std::move(numeric));
    } else {
      std::vector<std::string> cat(nrow);
      for (std::size_t r = 0; r < nrow; ++r) {
        const std::string& cell = records[r + 1][j];
        cat[r] = is_missing_token(cell) ? std::string() : std::string(detail::trim(cell));
      }
      columns.emplace_back(std::move(cat));
    }
  }
  return DataTable(std::move(names), std::move(columns));
}

DataTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open file").in_file(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::IoError, "read failed").in_file(path);
  try {
    return parse_csv(ss.str());
  } catch (Error& e) {
    e.path = path;
    throw;
  }
}

void write_csv(const DataTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open file for writing").in_file(path);
  const auto& names = table.column_names();
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << quote_field(names[j]);
  out << '\n';
  for (std::size_t r = 0; r < table.n_rows(); ++r) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (j) out << ',';
      std::visit(
          [&](const auto& col) {
            using T = std::decay_t<decltype(col)>;
            if constexpr (std::is_same_v<T, DataTable::NumericColumn>) {
              if (!std::isnan(col[r])) out << detail::format_double(col[r]);
              else out << "NA";
            } else {
              out << (col[r].empty() ? std::string("NA") : quote_field(col[r]));
            }
          },
          table.column(j));
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::IoError, "write failed").in_file(path);
}

DesignMatrices build_design(const DataTable& table, const BoundFormula& binding, LinkCode link) {
  const std::size_t n = table.n_rows();
  const int k = static_cast<int>(binding.responses.size());
  DesignMatrices d;
  d.link = link;

  if (link == LinkCode::Logit && k < 2) {
    throw Error(ErrorKind::InvalidArgument, "logit link needs at least two responses (last is the reference)");
  }

  d.y.resize(static_cast<Eigen::Index>(n), k);
  for (int l = 0; l < k; ++l) {
    const auto& bc = binding.responses[l];
    d.y_labels.push_back(bc.name);
    if (bc.kind != ColumnKind::Numeric) {
      throw Error(ErrorKind::CategoricalResponse, "responses must be numeric").in_column(bc.name);
    }
    const auto& col = std::get<DataTable::NumericColumn>(table.column(bc.index));
    for (std::size_t i = 0; i < n; ++i) {
      double v = col[i];
      if (!std::isfinite(v)) throw Error(ErrorKind::MissingValue, "missing or non-finite response").at_row(i + 1).in_column(bc.name);
      switch (link) {
        case LinkCode::Probit:
          if (v != 0.0 && v != 1.0) {
            throw Error(ErrorKind::NonBinaryResponse, "probit responses must be 0 or 1, got " + detail::format_double(v))
                .at_row(i + 1).in_column(bc.name);
          }
          break;
        case LinkCode::Log:
        case LinkCode::Logit:
          if (v < 0.0 || v != std::floor(v)) {
            throw Error(ErrorKind::NonIntegerCount, "counts must be nonnegative integers, got " + detail::format_double(v))
                .at_row(i + 1).in_column(bc.name);
          }
          break;
        case LinkCode::Identity:
          break;
      }
      d.y(static_cast<Eigen::Index>(i), l) = v;
    }
  }
  if (link == LinkCode::Logit) {
    for (Eigen::Index i = 0; i < d.y.rows(); ++i) {
      if (d.y.row(i).sum() == 0.0) throw Error(ErrorKind::ZeroRowTotal, "row has zero total count").at_row(static_cast<std::size_t>(i) + 1);
    }
  }
  d.y_centering = Vector::Zero(k);
  if (link == LinkCode::Identity && n > 0) {
    d.y_centering = d.y.colwise().mean().transpose();
    d.y.rowwise() -= d.y_centering.transpose();
  }

  // Expand predictors column by column.
  std::vector<Vector> cols;
  for (std::size_t s = 0; s < binding.predictors.size(); ++s) {
    const auto& bc = binding.predictors[s];
    if (bc.kind == ColumnKind::Numeric) {
      const auto& col = std::get<DataTable::NumericColumn>(table.column(bc.index));
      Vector v(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(col[i])) throw Error(ErrorKind::MissingValue, "missing or non-finite predictor").at_row(i + 1).in_column(bc.name);
        v(static_cast<Eigen::Index>(i)) = col[i];
      }
      cols.push_back(std::move(v));
      d.x_labels.push_back(bc.name);
      d.x_is_dummy.push_back(false);
      d.x_source.push_back(s);
    } else {
      const auto& col = std::get<DataTable::CategoricalColumn>(table.column(bc.index));
      std::set<std::string> levels;
      for (std::size_t i = 0; i < n; ++i) {
        if (col[i].empty()) throw Error(ErrorKind::MissingValue, "missing categorical value").at_row(i + 1).in_column(bc.name);
        levels.insert(col[i]);
      }
      if (levels.size() < 2) {
        throw Error(ErrorKind::ZeroVariancePredictor, "categorical predictor has fewer than two levels").in_column(bc.name);
      }
      auto it = levels.begin();
      for (++it; it != levels.end(); ++it) {
        Vector v(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = col[i] == *it ? 1.0 : 0.0;
        cols.push_back(std::move(v));
        d.x_labels.push_back(bc.name + "=" + *it);
        d.x_is_dummy.push_back(true);
        d.x_source.push_back(s);
      }
    }
  }

  const int p = static_cast<int>(cols.size());
  d.x.resize(static_cast<Eigen::Index>(n), p);
  d.x_means.resize(p);
  d.x_scales.resize(p);
  for (int j = 0; j < p; ++j) {
    const Vector& v = cols[j];
    double mean = n > 0 ? v.mean() : 0.0;
    double scale = 1.0;
    if (!d.x_is_dummy[j]) {
      double ss = (v.array() - mean).square().sum();
      scale = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
      if (!(scale > 0.0)) {
        throw Error(ErrorKind::ZeroVariancePredictor, "predictor has zero variance").in_column(d.x_labels[j]);
      }
    }
    d.x_means(j) = mean;
    d.x_scales(j) = scale;
    d.x.col(j) = (v.array() - mean) / scale;
  }
  return d;
}

Matrix destandardize(const DesignMatrices& design) {
  Matrix out = design.x;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    out.col(j) = out.col(j).array() * design.x_scales(j) + design.x_means(j);
  }
  return out;
}

}  // namespace carlasso
