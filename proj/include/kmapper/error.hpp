#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kmapper {

enum class ErrorKind {
  // dataset
  DuplicateVariable,
  InvalidVariableName,
  RaggedRow,
  NonNumericCell,
  EmptyTable,
  OutOfRange,
  WindowTooSmall,
  SpecExceedsTable,
  UnknownVariable,
  InvalidConfig,
  // relation
  TooFewPoints,
  ConstantSeries,
  // fuzzy
  NoCompleteRows,
  NoRuleFires,
  MissingInput,
  MixedConsequents,
  // kmap
  TooFewVariables,
  MalformedMap,
  // fcm
  TooFewStates,
  LengthMismatch,
  InvalidModel,
  // analysis
  VariableSetMismatch,
  // io
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DuplicateVariable: return "DuplicateVariable";
    case ErrorKind::InvalidVariableName: return "InvalidVariableName";
    case ErrorKind::RaggedRow: return "RaggedRow";
    case ErrorKind::NonNumericCell: return "NonNumericCell";
    case ErrorKind::EmptyTable: return "EmptyTable";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::SpecExceedsTable: return "SpecExceedsTable";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::ConstantSeries: return "ConstantSeries";
    case ErrorKind::NoCompleteRows: return "NoCompleteRows";
    case ErrorKind::NoRuleFires: return "NoRuleFires";
    case ErrorKind::MissingInput: return "MissingInput";
    case ErrorKind::MixedConsequents: return "MixedConsequents";
    case ErrorKind::TooFewVariables: return "TooFewVariables";
    case ErrorKind::MalformedMap: return "MalformedMap";
    case ErrorKind::TooFewStates: return "TooFewStates";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::VariableSetMismatch: return "VariableSetMismatch";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Every library failure is reported as an Error carrying a kind the CLI can
/// name in its diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace kmapper
