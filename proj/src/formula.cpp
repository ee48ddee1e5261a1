#include "carlasso/formula.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "carlasso/error.hpp"
#include "carlasso/ingest.hpp"

namespace carlasso {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_alpha(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool ident_start(char c) { return is_alpha(c) || c == '_'; }
bool ident_char(char c) { return ident_start(c) || is_digit(c) || c == '.'; }

std::string describe_bad_char(char c) {
  switch (c) {
    case ':': return "interaction operator ':' is not supported";
    case '*': return "interaction operator '*' is not supported";
    case '-': return "term removal '-' (e.g. -1) is not supported";
    case '(':
    case ')': return "function calls and grouping '(...)' are not supported";
    case '|': return "random-effect bars '|' are not supported";
    case '^': return "power operator '^' is not supported";
    case '/': return "nesting operator '/' is not supported";
    default: break;
  }
  auto uc = static_cast<unsigned char>(c);
  if (uc < 0x20 || uc >= 0x7f) return "unexpected byte 0x" + std::to_string(uc) + " in formula";
  return std::string("unexpected character '") + c + "'";
}

struct Term {
  std::string name;
  std::size_t offset;
};

// Parses one side occupying [begin, end) of `text`. `tilde` is the offset of
// the '~' used for EmptySide reporting.
std::vector<Term> parse_side(std::string_view text, std::size_t begin, std::size_t end,
                             std::size_t tilde, const char* side_name) {
  std::vector<Term> terms;
  std::size_t i = begin;
  auto skip_ws = [&] {
    while (i < end && is_space(text[i])) ++i;
  };
  skip_ws();
  if (i == end) {
    throw Error(ErrorKind::EmptySide, std::string("formula has no ") + side_name)
        .at_offset(std::min(tilde, text.empty() ? 0 : text.size() - 1));
  }
  for (;;) {
    skip_ws();
    if (i == end || text[i] == '+') {
      std::size_t at = i < end ? i : (end > begin ? end - 1 : begin);
      throw Error(ErrorKind::InvalidIdentifier, std::string("empty term in ") + side_name)
          .at_offset(at);
    }
    std::size_t start = i;
    char c = text[i];
    if (!ident_start(c)) {
      if (c == '.' && (i + 1 == end || !ident_char(text[i + 1]))) {
        throw Error(ErrorKind::InvalidIdentifier, "the '.' all-columns wildcard is not supported")
            .at_offset(i);
      }
      if (is_digit(c)) {
        throw Error(ErrorKind::InvalidIdentifier,
                    "numeric terms (intercept control) are not supported")
            .at_offset(i);
      }
      if (c == '.') {
        throw Error(ErrorKind::InvalidIdentifier, "identifiers must start with a letter or '_'")
            .at_offset(i);
      }
      throw Error(ErrorKind::InvalidIdentifier, describe_bad_char(c)).at_offset(i);
    }
    while (i < end && ident_char(text[i])) ++i;
    terms.push_back({std::string(text.substr(start, i - start)), start});
    skip_ws();
    if (i == end) break;
    if (text[i] == '+') {
      ++i;
      continue;
    }
    if (ident_start(text[i]) || is_digit(text[i])) {
      throw Error(ErrorKind::InvalidIdentifier, "missing '+' between terms").at_offset(i);
    }
    throw Error(ErrorKind::InvalidIdentifier, describe_bad_char(text[i])).at_offset(i);
  }
  return terms;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

FormulaSpec parse_formula(std::string_view text) {
  std::vector<std::size_t> tildes;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '~') tildes.push_back(i);
  }
  if (tildes.empty()) {
    throw Error(ErrorKind::MissingTilde, "formula must contain '~' separating responses and predictors")
        .at_offset(0);
  }
  if (tildes.size() > 1) {
    throw Error(ErrorKind::MissingTilde, "formula must contain exactly one '~'").at_offset(tildes[1]);
  }
  const std::size_t tilde = tildes.front();
  auto lhs = parse_side(text, 0, tilde, tilde, "responses");
  auto rhs = parse_side(text, tilde + 1, text.size(), tilde, "predictors");

  FormulaSpec spec;
  spec.raw_text = std::string(text);
  std::unordered_map<std::string, bool> seen;  // name -> is response
  for (auto* side : {&lhs, &rhs}) {
    const bool response_side = side == &lhs;
    for (const auto& t : *side) {
      auto [it, inserted] = seen.emplace(t.name, response_side);
      if (!inserted) {
        std::string msg = "'" + t.name + "' appears ";
        msg += it->second == response_side ? "twice" : "as both response and predictor";
        throw Error(ErrorKind::DuplicateName, msg).at_offset(t.offset);
      }
      (response_side ? spec.responses : spec.predictors).push_back(t.name);
    }
  }
  return spec;
}

std::string render(const FormulaSpec& spec) {
  std::string out;
  auto join = [&out](const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) out += " + ";
      out += names[i];
    }
  };
  join(spec.responses);
  out += " ~ ";
  join(spec.predictors);
  return out;
}

BoundFormula validate_against_table(const FormulaSpec& spec, const DataTable& table) {
  BoundFormula bound;
  bound.spec = spec;
  auto resolve = [&](const std::string& name) {
    auto idx = table.find(name);
    if (!idx) {
      std::string best;
      std::size_t best_d = std::numeric_limits<std::size_t>::max();
      for (const auto& c : table.column_names()) {
        std::size_t d = edit_distance(name, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      std::string msg = "no column named '" + name + "'";
      if (!best.empty()) msg += "; did you mean '" + best + "'?";
      throw Error(ErrorKind::UnknownColumn, msg).in_column(name);
    }
    return BoundColumn{name, *idx,
                       table.is_numeric(*idx) ? ColumnKind::Numeric : ColumnKind::Categorical};
  };
  for (const auto& r : spec.responses) bound.responses.push_back(resolve(r));
  for (const auto& p : spec.predictors) bound.predictors.push_back(resolve(p));
  return bound;
}

}  // namespace carlasso
