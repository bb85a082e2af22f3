#include "lexivar/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "lexivar/error.hpp"
#include "lexivar/unicode.hpp"

namespace lexivar {

std::string_view to_string(TableFormat format) {
  return format == TableFormat::csv ? "csv" : "tsv";
}

TableFormat parse_table_format(std::string_view text) {
  if (text == "csv") return TableFormat::csv;
  if (text == "tsv") return TableFormat::tsv;
  throw Error(ErrorKind::ConfigError, "unknown table format '" + std::string(text) +
                                          "' (expected csv or tsv)");
}

DatasetSource DatasetSource::from_file(std::filesystem::path path, bool has_header) {
  DatasetSource source;
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  source.format = ext == ".csv" ? TableFormat::csv : TableFormat::tsv;
  source.location = path.string();
  source.has_header = has_header;
  return source;
}

DatasetSource DatasetSource::from_string(std::string text, TableFormat format, bool has_header) {
  DatasetSource source;
  source.location = "<inline>";
  source.format = format;
  source.has_header = has_header;
  source.inline_text = std::move(text);
  return source;
}

ColumnRef::ColumnRef(int index) : key_(static_cast<std::size_t>(index)) {
  if (index < 0) throw Error(ErrorKind::UnknownColumn, "column index must be non-negative");
}

std::string ColumnRef::display() const {
  return is_name() ? "'" + name() + "'" : "#" + std::to_string(index());
}

std::size_t RawTable::column_count() const {
  if (!column_names.empty()) return column_names.size();
  return rows.empty() ? 0 : rows.front().size();
}

std::size_t RawTable::resolve(const ColumnRef& ref) const {
  if (ref.is_name()) {
    auto it = std::find(column_names.begin(), column_names.end(), ref.name());
    if (it != column_names.end()) return static_cast<std::size_t>(it - column_names.begin());
    if (column_names.empty()) {
      // Headerless tables address columns by index only; accept "3" as #3.
      std::size_t index = 0;
      const auto& s = ref.name();
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), index);
      if (ec == std::errc() && ptr == s.data() + s.size() && index < column_count()) return index;
    }
    throw Error(ErrorKind::UnknownColumn, "unknown column " + ref.display());
  }
  if (ref.index() >= column_count()) {
    throw Error(ErrorKind::UnknownColumn, "column index " + std::to_string(ref.index()) +
                                              " out of range (table has " +
                                              std::to_string(column_count()) + " columns)");
  }
  return ref.index();
}

std::string RawTable::column_label(std::size_t index) const {
  return column_names.empty() ? std::to_string(index) : column_names.at(index);
}

RowReader::RowReader(std::istream& in, TableFormat format) : in_(in), format_(format) {}

bool RowReader::next(std::vector<std::string>& cells) {
  return format_ == TableFormat::csv ? next_csv(cells) : next_tsv(cells);
}

namespace {

bool read_line(std::istream& in, std::string& line, std::size_t& counter) {
  if (!std::getline(in, line)) return false;
  ++counter;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (counter == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  if (auto bad = unicode::find_invalid_utf8(line)) {
    throw Error(ErrorKind::EncodingError, "invalid UTF-8 at line " + std::to_string(counter) +
                                              ", byte " + std::to_string(*bad + 1));
  }
  return true;
}

}  // namespace

bool RowReader::next_tsv(std::vector<std::string>& cells) {
  std::string line;
  do {
    if (!read_line(in_, line, line_)) return false;
  } while (line.empty());
  record_line_ = line_;
  cells.clear();
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cells.emplace_back(line.substr(start));
      break;
    }
    cells.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return true;
}

bool RowReader::next_csv(std::vector<std::string>& cells) {
  std::string line;
  do {
    if (!read_line(in_, line, line_)) return false;
  } while (line.empty());
  record_line_ = line_;
  cells.clear();

  std::string cell;
  std::size_t i = 0;
  while (true) {
    cell.clear();
    if (i < line.size() && line[i] == '"') {
      ++i;
      while (true) {
        if (i >= line.size()) {
          // Quoted cells may span lines.
          std::string continuation;
          if (!read_line(in_, continuation, line_)) {
            throw MalformedRowError(record_line_, "unterminated quoted field");
          }
          cell.push_back('\n');
          line = std::move(continuation);
          i = 0;
          continue;
        }
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            cell.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        cell.push_back(line[i++]);
      }
      if (i < line.size() && line[i] != ',') {
        throw MalformedRowError(line_, "unexpected character after closing quote");
      }
    } else {
      auto comma = line.find(',', i);
      auto end = comma == std::string::npos ? line.size() : comma;
      cell.assign(line, i, end - i);
      i = end;
    }
    cells.push_back(cell);
    if (i >= line.size()) break;
    ++i;  // skip the comma
    if (i == line.size()) {
      cells.emplace_back();
      break;
    }
  }
  return true;
}

RawTable load_dataset(const DatasetSource& source) {
  std::ifstream file;
  std::istringstream inline_stream;
  std::istream* in = nullptr;
  if (source.inline_text) {
    inline_stream.str(*source.inline_text);
    in = &inline_stream;
  } else {
    if (!std::filesystem::is_regular_file(source.location)) {
      throw Error(ErrorKind::FileNotFound, "dataset not found: " + source.location);
    }
    file.open(source.location, std::ios::binary);
    if (!file) throw Error(ErrorKind::FileNotFound, "cannot open dataset: " + source.location);
    in = &file;
  }

  RawTable table;
  RowReader reader(*in, source.format);
  std::vector<std::string> cells;
  std::size_t width = 0;
  bool first = true;
  while (reader.next(cells)) {
    if (first) {
      width = cells.size();
      first = false;
      if (source.has_header) {
        table.column_names = cells;
        continue;
      }
    }
    if (cells.size() != width) {
      throw MalformedRowError(reader.record_line(), "expected " + std::to_string(width) +
                                                        " cells, found " +
                                                        std::to_string(cells.size()));
    }
    table.rows.push_back(cells);
    table.line_numbers.push_back(reader.record_line());
  }
  return table;
}

std::string write_table(const RawTable& table, TableFormat format) {
  const char delimiter = format == TableFormat::csv ? ',' : '\t';
  std::string out;
  auto write_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out.push_back(delimiter);
      const auto& cell = row[i];
      const bool quote =
          format == TableFormat::csv &&
          (cell.find_first_of(",\"\n\r") != std::string::npos || (row.size() == 1 && cell.empty()));
      if (!quote) {
        out += cell;
        continue;
      }
      out.push_back('"');
      for (char c : cell) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
      }
      out.push_back('"');
    }
    out.push_back('\n');
  };
  if (!table.column_names.empty()) write_row(table.column_names);
  for (const auto& row : table.rows) write_row(row);
  return out;
}

AnalysisTable select_columns(const RawTable& table, const std::vector<ColumnRef>& texts,
                             const std::vector<ColumnRef>& variables) {
  if (texts.empty()) throw Error(ErrorKind::ConfigError, "at least one text column is required");
  if (texts.size() > 2) {
    throw Error(ErrorKind::TooManyTextColumns,
                "at most two text columns are supported, got " + std::to_string(texts.size()));
  }

  std::vector<std::size_t> text_idx;
  std::vector<std::size_t> var_idx;
  for (const auto& ref : texts) text_idx.push_back(table.resolve(ref));
  for (const auto& ref : variables) var_idx.push_back(table.resolve(ref));

  std::vector<std::size_t> all = text_idx;
  all.insert(all.end(), var_idx.begin(), var_idx.end());
  std::vector<std::size_t> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  if (auto dup = std::adjacent_find(sorted.begin(), sorted.end()); dup != sorted.end()) {
    throw Error(ErrorKind::OverlappingSelection,
                "column '" + table.column_label(*dup) + "' is selected more than once");
  }

  AnalysisTable out;
  for (auto i : text_idx) out.text_column_names.push_back(table.column_label(i));
  for (auto i : var_idx) out.variable_names.push_back(table.column_label(i));
  if (out.has_text_source()) out.variable_names.emplace_back(kTextSourceVariable);
  out.variables.resize(out.variable_names.size());

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    for (std::size_t t = 0; t < text_idx.size(); ++t) {
      const auto& text = row[text_idx[t]];
      if (text.empty()) continue;
      out.texts.push_back(text);
      out.source_column.push_back(t);
      out.physical_lines.push_back(table.line_numbers.empty() ? r + 1 : table.line_numbers[r]);
      for (std::size_t v = 0; v < var_idx.size(); ++v) out.variables[v].push_back(row[var_idx[v]]);
      if (out.has_text_source()) out.variables.back().push_back(out.text_column_names[t]);
    }
  }
  if (out.texts.empty()) throw Error(ErrorKind::EmptyTable, "no non-empty text cells selected");
  return out;
}

}  // namespace lexivar
