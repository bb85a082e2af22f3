#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lexivar/error.hpp"

namespace lexivar {

enum class TableFormat { tsv, csv };

std::string_view to_string(TableFormat format);
TableFormat parse_table_format(std::string_view text);

/// Where a dataset comes from. `inline_text`, when set, is parsed instead of
/// reading `location` from disk.
struct DatasetSource {
  std::string location;
  TableFormat format = TableFormat::tsv;
  bool has_header = true;
  std::optional<std::string> inline_text;

  static DatasetSource from_file(std::filesystem::path path, bool has_header = true);
  static DatasetSource from_string(std::string text, TableFormat format, bool has_header = true);
  bool operator==(const DatasetSource&) const = default;
};

/// A column addressed by header name or by zero-based index.
class ColumnRef {
public:
  ColumnRef(std::string name) : key_(std::move(name)) {}
  ColumnRef(const char* name) : key_(std::string(name)) {}
  ColumnRef(std::size_t index) : key_(index) {}
  ColumnRef(int index);

  bool is_name() const { return std::holds_alternative<std::string>(key_); }
  const std::string& name() const { return std::get<std::string>(key_); }
  std::size_t index() const { return std::get<std::size_t>(key_); }
  std::string display() const;

  bool operator==(const ColumnRef&) const = default;

private:
  std::variant<std::string, std::size_t> key_;
};

/// Rectangular table of string cells as read from disk.
struct RawTable {
  std::vector<std::string> column_names;  // empty when the source had no header
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based physical line where each row starts

  std::size_t column_count() const;
  std::size_t resolve(const ColumnRef& ref) const;
  std::string column_label(std::size_t index) const;
};

/// Incremental reader yielding one record at a time, so callers can process
/// files larger than memory.
class RowReader {
public:
  RowReader(std::istream& in, TableFormat format);

  /// Reads the next record into `cells`. Returns false at end of input.
  bool next(std::vector<std::string>& cells);
  /// 1-based line on which the most recently returned record started.
  std::size_t record_line() const { return record_line_; }

private:
  bool next_csv(std::vector<std::string>& cells);
  bool next_tsv(std::vector<std::string>& cells);

  std::istream& in_;
  TableFormat format_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

RawTable load_dataset(const DatasetSource& source);

/// Writes `table` back in `format`, quoting CSV cells only when required.
std::string write_table(const RawTable& table, TableFormat format);

inline constexpr std::string_view kTextSourceVariable = "__text_source__";

/// One logical row per non-empty text cell. With two text columns every
/// physical row contributes up to two logical rows that share its variable
/// values; `source_column` says which text column produced the row.
struct AnalysisTable {
  std::vector<std::string> text_column_names;
  std::vector<std::string> variable_names;
  std::vector<std::string> texts;
  std::vector<std::vector<std::string>> variables;  // column-major, one vector per variable
  std::vector<std::size_t> source_column;
  std::vector<std::size_t> physical_lines;

  std::size_t row_count() const { return texts.size(); }
  bool has_text_source() const { return text_column_names.size() == 2; }
  const std::string& variable_value(std::size_t variable, std::size_t row) const {
    return variables[variable][row];
  }
};

AnalysisTable select_columns(const RawTable& table, const std::vector<ColumnRef>& texts,
                             const std::vector<ColumnRef>& variables);

}  // namespace lexivar
