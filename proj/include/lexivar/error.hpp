#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lexivar {

enum class ErrorKind {
  // corpus-io
  FileNotFound,
  MalformedRow,
  EncodingError,
  UnknownColumn,
  TooManyTextColumns,
  OverlappingSelection,
  EmptyTable,
  // unitizer
  UnknownTokenizer,
  InvalidToken,
  StopwordFileNotFound,
  WindowTooSmall,
  // variable-model
  NonNumericValue,
  UnknownVariableColumn,
  InvalidDeclaration,
  CoordinateOutOfRange,
  MalformedTuple,
  // metrics
  EmptyCorpus,
  SingleClass,
  // inspector
  ConfigError,
  SchemaError,
  // chart-planner
  UnsupportedCombination,
  InvalidPattern,
  GeometryError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `kind` is the machine-readable
/// category; `what()` carries the human-readable diagnostic.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Malformed input row; `line` is 1-based and counts physical lines.
class MalformedRowError : public Error {
public:
  MalformedRowError(std::size_t line, const std::string& detail)
      : Error(ErrorKind::MalformedRow,
              "malformed row at line " + std::to_string(line) + ": " + detail),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Interchange document violation. `path` is a JSONPath-like pointer to the
/// first offending node, e.g. `$.metadata.variables`.
class SchemaError : public Error {
public:
  SchemaError(std::string path, const std::string& detail)
      : Error(ErrorKind::SchemaError, "schema error at " + path + ": " + detail),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

/// Non-fatal conditions (degenerate binning, empty chart slices, ...) are
/// collected here instead of being thrown.
using Warnings = std::vector<std::string>;

}  // namespace lexivar
