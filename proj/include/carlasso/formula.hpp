#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace carlasso {

class DataTable;

/// Parsed `y1 + ... + yk ~ x1 + ... + xp`.
///
/// Response order is significant: under the logit link the last response
/// is the reference category.
struct FormulaSpec {
  std::vector<std::string> responses;
  std::vector<std::string> predictors;
  std::string raw_text;

  bool operator==(const FormulaSpec& o) const {
    return responses == o.responses && predictors == o.predictors;
  }
};

/// Grammar: side ('~' side), side := ident ('+' ident)*,
/// ident := [A-Za-z_][A-Za-z0-9_.]*. Whitespace (including newlines)
/// between tokens is ignored. Interactions, intercept removal, function
/// calls and the `.` wildcard are rejected with InvalidIdentifier.
///
/// Every thrown Error carries a byte offset inside the offending token.
FormulaSpec parse_formula(std::string_view text);

/// Canonical text form: "a + b ~ c + d".
std::string render(const FormulaSpec& spec);

enum class ColumnKind { Numeric, Categorical };

struct BoundColumn {
  std::string name;
  std::size_t index;
  ColumnKind kind;
};

struct BoundFormula {
  FormulaSpec spec;
  std::vector<BoundColumn> responses;
  std::vector<BoundColumn> predictors;
};

/// Resolves every formula name to a table column. Unknown names raise
/// UnknownColumn with the closest existing column name as a suggestion.
BoundFormula validate_against_table(const FormulaSpec& spec, const DataTable& table);

}  // namespace carlasso
