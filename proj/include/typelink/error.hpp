#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace typelink {

enum class ErrorKind {
  ParseError,
  DuplicateFineType,
  UnknownFineType,
  DuplicateCui,
  MissingTypes,
  SpanError,
  UnknownDocument,
  DuplicateCandidate,
  EmptyDataset,
  NumericalDivergence,
  UnknownGroup,
  RangeError,
  UnknownCui,
  AlignmentError,
  EmptyOverlap,
  InjectivityError,
  UndefinedMetric,
  IoError,
  ConfigError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  /// Input/usage errors exit the CLI with status 2; everything else is an
  /// internal failure (status 1).
  bool is_input_error() const { return kind_ != ErrorKind::NumericalDivergence; }

 private:
  ErrorKind kind_;
};

/// Non-fatal diagnostics collected by operations that are specified to keep
/// going (unresolvable cuis, skipped headings, defaulted thresholds, ...).
using WarningList = std::vector<std::string>;

inline void warn(WarningList* sink, std::string message) {
  if (sink != nullptr) sink->push_back(std::move(message));
}

}  // namespace typelink
