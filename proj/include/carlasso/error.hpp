#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace carlasso {

enum class ErrorKind {
  MissingTilde,
  EmptySide,
  DuplicateName,
  InvalidIdentifier,
  UnknownColumn,
  IoError,
  RaggedRow,
  EmptyFile,
  MissingValue,
  NonIntegerCount,
  NonBinaryResponse,
  ZeroVariancePredictor,
  CategoricalResponse,
  ZeroRowTotal,
  DimensionMismatch,
  InvalidArgument,
  DomainError,
  NumericalBreakdown,
  NotSPD,
  SingularSystem,
  InsufficientDraws,
  TooFewDraws,
  CorruptChain,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library. `kind` is the structured error
/// class; optional location fields are filled where the error has one.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message);

  ErrorKind kind() const noexcept { return kind_; }

  std::optional<std::size_t> offset;  // byte offset into a parsed string
  std::optional<std::size_t> row;     // 1-based data row (header excluded)
  std::optional<std::string> column;
  std::optional<std::string> path;

  Error& at_offset(std::size_t o) & { offset = o; return *this; }
  Error&& at_offset(std::size_t o) && { offset = o; return std::move(*this); }
  Error&& at_row(std::size_t r) && { row = r; return std::move(*this); }
  Error&& in_column(std::string c) && { column = std::move(c); return std::move(*this); }
  Error&& in_file(std::string p) && { path = std::move(p); return std::move(*this); }

  /// "Kind: message (row 3, column 'x')" style one-liner.
  std::string describe() const;

 private:
  ErrorKind kind_;
};

}  // namespace carlasso
