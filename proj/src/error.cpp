#include "lexivar/error.hpp"

namespace lexivar {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::EncodingError: return "EncodingError";
    case ErrorKind::UnknownColumn: return "UnknownColumn";
    case ErrorKind::TooManyTextColumns: return "TooManyTextColumns";
    case ErrorKind::OverlappingSelection: return "OverlappingSelection";
    case ErrorKind::EmptyTable: return "EmptyTable";
    case ErrorKind::UnknownTokenizer: return "UnknownTokenizer";
    case ErrorKind::InvalidToken: return "InvalidToken";
    case ErrorKind::StopwordFileNotFound: return "StopwordFileNotFound";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::NonNumericValue: return "NonNumericValue";
    case ErrorKind::UnknownVariableColumn: return "UnknownVariableColumn";
    case ErrorKind::InvalidDeclaration: return "InvalidDeclaration";
    case ErrorKind::CoordinateOutOfRange: return "CoordinateOutOfRange";
    case ErrorKind::MalformedTuple: return "MalformedTuple";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::UnsupportedCombination: return "UnsupportedCombination";
    case ErrorKind::InvalidPattern: return "InvalidPattern";
    case ErrorKind::GeometryError: return "GeometryError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace lexivar
