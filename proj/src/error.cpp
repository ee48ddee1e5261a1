#include "carlasso/error.hpp"

namespace carlasso {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingTilde: return "MissingTilde";
    case ErrorKind::EmptySide: return "EmptySide";
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::InvalidIdentifier: return "InvalidIdentifier";
    case ErrorKind::UnknownColumn: return "UnknownColumn";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::RaggedRow: return "RaggedRow";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::MissingValue: return "MissingValue";
    case ErrorKind::NonIntegerCount: return "NonIntegerCount";
    case ErrorKind::NonBinaryResponse: return "NonBinaryResponse";
    case ErrorKind::ZeroVariancePredictor: return "ZeroVariancePredictor";
    case ErrorKind::CategoricalResponse: return "CategoricalResponse";
    case ErrorKind::ZeroRowTotal: return "ZeroRowTotal";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorKind::NotSPD: return "NotSPD";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::InsufficientDraws: return "InsufficientDraws";
    case ErrorKind::TooFewDraws: return "TooFewDraws";
    case ErrorKind::CorruptChain: return "CorruptChain";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, std::string message)
    : std::runtime_error(std::move(message)), kind_(kind) {}

std::string Error::describe() const {
  std::string out(to_string(kind_));
  out += ": ";
  out += what();
  std::string loc;
  auto add = [&loc](const std::string& part) {
    loc += loc.empty() ? " (" : ", ";
    loc += part;
  };
  if (path) add("file '" + *path + "'");
  if (row) add("row " + std::to_string(*row));
  if (column) add("column '" + *column + "'");
  if (offset) add("byte " + std::to_string(*offset));
  if (!loc.empty()) out += loc + ")";
  return out;
}

}  // namespace carlasso
