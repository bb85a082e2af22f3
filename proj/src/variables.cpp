#include "lexivar/variables.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace lexivar {

std::string_view to_string(VarType type) {
  switch (type) {
    case VarType::nominal: return "nominal";
    case VarType::ordinal: return "ordinal";
    case VarType::quantitative: return "quantitative";
    case VarType::coordinate: return "coordinate";
  }
  return "nominal";
}

std::string_view to_string(Semantics semantics) {
  switch (semantics) {
    case Semantics::temporal: return "temporal";
    case Semantics::spatial: return "spatial";
    case Semantics::general: return "general";
  }
  return "general";
}

std::string_view to_string(Axis axis) { return axis == Axis::latitude ? "latitude" : "longitude"; }

VarType parse_var_type(std::string_view text) {
  if (text == "nominal") return VarType::nominal;
  if (text == "ordinal") return VarType::ordinal;
  if (text == "quantitative") return VarType::quantitative;
  if (text == "coordinate") return VarType::coordinate;
  throw Error(ErrorKind::InvalidDeclaration, "unknown variable type '" + std::string(text) + "'");
}

Semantics parse_semantics(std::string_view text) {
  if (text == "temporal") return Semantics::temporal;
  if (text == "spatial") return Semantics::spatial;
  if (text == "general") return Semantics::general;
  throw Error(ErrorKind::InvalidDeclaration,
              "unknown variable semantics '" + std::string(text) + "'");
}

Axis parse_axis(std::string_view text) {
  if (text == "latitude" || text == "lat") return Axis::latitude;
  if (text == "longitude" || text == "lon") return Axis::longitude;
  throw Error(ErrorKind::InvalidDeclaration, "unknown coordinate axis '" + std::string(text) + "'");
}

void VariableDecl::validate() {
  if (name.empty()) throw Error(ErrorKind::InvalidDeclaration, "variable name must not be empty");
  if (bins) {
    if (!is_numeric()) {
      throw Error(ErrorKind::InvalidDeclaration,
                  "bins are only allowed for quantitative or coordinate variables ('" + name + "')");
    }
    if (*bins == 0) throw Error(ErrorKind::InvalidDeclaration, "bins must be positive ('" + name + "')");
  }
  if (type != VarType::coordinate) {
    if (axis) {
      throw Error(ErrorKind::InvalidDeclaration,
                  "axis is only allowed for coordinate variables ('" + name + "')");
    }
    return;
  }
  if (semantics != Semantics::spatial) {
    throw Error(ErrorKind::InvalidDeclaration,
                "coordinate variable '" + name + "' must have spatial semantics");
  }
  if (!axis) {
    std::string lower;
    for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower.starts_with("lat")) {
      axis = Axis::latitude;
    } else if (lower.starts_with("lon") || lower.starts_with("lng")) {
      axis = Axis::longitude;
    } else {
      throw Error(ErrorKind::InvalidDeclaration,
                  "cannot infer axis for coordinate variable '" + name +
                      "'; add :axis=latitude or :axis=longitude");
    }
  }
}

VariableDecl parse_variable_decl(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto colon = text.find(':', start);
    parts.emplace_back(text.substr(start, colon == std::string_view::npos ? colon : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() < 3) {
    throw Error(ErrorKind::InvalidDeclaration,
                "variable '" + std::string(text) + "' must look like NAME:TYPE:SEMANTICS");
  }
  VariableDecl decl;
  decl.name = parts[0];
  decl.type = parse_var_type(parts[1]);
  decl.semantics = parse_semantics(parts[2]);
  for (std::size_t i = 3; i < parts.size(); ++i) {
    const auto& opt = parts[i];
    if (opt.starts_with("bins=")) {
      std::size_t k = 0;
      const char* begin = opt.data() + 5;
      const char* end = opt.data() + opt.size();
      auto [ptr, ec] = std::from_chars(begin, end, k);
      if (ec != std::errc() || ptr != end || k == 0) {
        throw Error(ErrorKind::InvalidDeclaration, "invalid bin count in '" + opt + "'");
      }
      decl.bins = k;
    } else if (opt.starts_with("axis=")) {
      decl.axis = parse_axis(std::string_view(opt).substr(5));
    } else {
      throw Error(ErrorKind::InvalidDeclaration, "unknown variable option '" + opt + "'");
    }
  }
  decl.validate();
  return decl;
}

std::string serialize_tuple(const ValueTuple& tuple) {
  std::string out;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (i > 0) out += "::";
    for (char c : tuple[i]) {
      if (c == '\\' || c == ':') out.push_back('\\');
      out.push_back(c);
    }
  }
  return out;
}

ValueTuple deserialize_tuple(std::string_view key) {
  ValueTuple out;
  std::string current;
  for (std::size_t i = 0; i < key.size(); ++i) {
    const char c = key[i];
    if (c == '\\') {
      if (i + 1 >= key.size()) {
        throw Error(ErrorKind::MalformedTuple, "dangling escape in tuple key '" + std::string(key) + "'");
      }
      current.push_back(key[++i]);
    } else if (c == ':') {
      if (i + 1 >= key.size() || key[i + 1] != ':') {
        throw Error(ErrorKind::MalformedTuple, "unescaped ':' in tuple key '" + std::string(key) + "'");
      }
      out.push_back(std::move(current));
      current.clear();
      ++i;
    } else {
      current.push_back(c);
    }
  }
  out.push_back(std::move(current));
  return out;
}

ValueTuple deserialize_tuple(std::string_view key, std::size_t arity) {
  if (arity == 0) {
    if (!key.empty()) throw Error(ErrorKind::MalformedTuple, "expected the empty tuple key");
    return {};
  }
  auto tuple = deserialize_tuple(key);
  if (tuple.size() != arity) {
    throw Error(ErrorKind::MalformedTuple, "tuple key '" + std::string(key) + "' has " +
                                               std::to_string(tuple.size()) + " values, expected " +
                                               std::to_string(arity));
  }
  return tuple;
}

std::size_t BinScheme::index_of(double value) const {
  if (!(max > min)) return 0;
  const double raw = std::floor((value - min) / width());
  if (raw <= 0.0) return 0;
  const auto index = static_cast<std::size_t>(raw);
  return std::min(index, k - 1);
}

namespace {

std::string fixed6(double v) {
  if (v == 0.0) v = 0.0;  // no "-0.000000"
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.6f", v);
  std::string s(buf.data());
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::optional<double> parse_number(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

std::string BinScheme::label(std::size_t index) const {
  const double w = width();
  const double lo = min + static_cast<double>(index) * w;
  const double hi = index + 1 == k ? max : min + static_cast<double>(index + 1) * w;
  return "[" + fixed6(lo) + ", " + fixed6(hi) + (index + 1 == k ? "]" : ")");
}

BinnedValues bin_values(const std::vector<double>& values, std::size_t k, Warnings* warnings) {
  if (values.empty()) throw Error(ErrorKind::ConfigError, "cannot bin an empty value list");
  if (k == 0) throw Error(ErrorKind::ConfigError, "bin count must be positive");
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonNumericValue, "cannot bin a non-finite value");
  }
  BinnedValues out;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  out.scheme = BinScheme{*lo, *hi, k};
  if (*lo == *hi && k > 1 && warnings) {
    warnings->push_back("DegenerateRange: all values equal " + fixed6(*lo) +
                        "; every value assigned to bin 0");
  }
  std::map<std::size_t, std::string> label_cache;
  out.indices.reserve(values.size());
  out.labels.reserve(values.size());
  for (double v : values) {
    const auto index = out.scheme.index_of(v);
    out.indices.push_back(index);
    auto [it, inserted] = label_cache.try_emplace(index);
    if (inserted) it->second = out.scheme.label(index);
    out.labels.push_back(it->second);
  }
  return out;
}

std::optional<std::pair<double, double>> parse_bin_label(std::string_view label) {
  if (label.size() < 5 || label.front() != '[' || (label.back() != ')' && label.back() != ']')) {
    return std::nullopt;
  }
  auto inner = label.substr(1, label.size() - 2);
  auto comma = inner.find(", ");
  if (comma == std::string_view::npos) return std::nullopt;
  auto lo = parse_number(inner.substr(0, comma));
  auto hi = parse_number(inner.substr(comma + 2));
  if (!lo || !hi) return std::nullopt;
  return std::make_pair(*lo, *hi);
}

bool numeric_aware_less(std::string_view a, std::string_view b) {
  auto na = parse_number(a);
  auto nb = parse_number(b);
  if (na && nb) {
    if (*na != *nb) return *na < *nb;
    return a < b;
  }
  if (na != nb) return na.has_value();  // numbers first
  return a < b;
}

namespace {

/// Parses YYYY-MM-DD with an optional THH:MM[:SS] part. Returns a sortable key.
std::optional<std::array<int, 6>> parse_iso_datetime(std::string_view s) {
  auto digits = [&](std::size_t pos, std::size_t count) -> std::optional<int> {
    if (pos + count > s.size()) return std::nullopt;
    int value = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
      if (s[i] < '0' || s[i] > '9') return std::nullopt;
      value = value * 10 + (s[i] - '0');
    }
    return value;
  };
  std::array<int, 6> key{};
  auto year = digits(0, 4);
  if (!year || s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto month = digits(5, 2);
  auto day = digits(8, 2);
  if (!month || !day || *month < 1 || *month > 12 || *day < 1 || *day > 31) return std::nullopt;
  key = {*year, *month, *day, 0, 0, 0};
  if (s.size() == 10) return key;
  if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
  auto hour = digits(11, 2);
  auto minute = digits(14, 2);
  if (!hour || !minute || s.size() < 16 || s[13] != ':') return std::nullopt;
  key[3] = *hour;
  key[4] = *minute;
  std::size_t pos = 16;
  if (s.size() >= 19 && s[16] == ':') {
    auto second = digits(17, 2);
    if (!second) return std::nullopt;
    key[5] = *second;
    pos = 19;
  }
  // Accept fractional seconds and zone designators without using them for ordering.
  for (; pos < s.size(); ++pos) {
    const char c = s[pos];
    if (!((c >= '0' && c <= '9') || c == '.' || c == 'Z' || c == '+' || c == '-' || c == ':')) {
      return std::nullopt;
    }
  }
  return key;
}

}  // namespace

bool temporal_less(std::string_view a, std::string_view b) {
  auto da = parse_iso_datetime(a);
  auto db = parse_iso_datetime(b);
  if (da && db) {
    if (*da != *db) return *da < *db;
    return a < b;
  }
  if (da.has_value() != db.has_value()) return da.has_value();
  return numeric_aware_less(a, b);
}

std::vector<std::string> TupleAssignment::tuple_keys() const {
  std::vector<std::string> keys;
  keys.reserve(tuples.size());
  for (const auto& t : tuples) keys.push_back(serialize_tuple(t));
  return keys;
}

namespace {

void sort_inventory(const VariableDecl& decl, std::vector<std::string>& values) {
  const bool has_missing =
      std::erase(values, std::string(kMissingValue)) > 0;
  if (decl.is_binned()) {
    std::sort(values.begin(), values.end(), [](const std::string& a, const std::string& b) {
      return parse_bin_label(a).value_or(std::pair{0.0, 0.0}).first <
             parse_bin_label(b).value_or(std::pair{0.0, 0.0}).first;
    });
  } else if (decl.semantics == Semantics::temporal) {
    std::sort(values.begin(), values.end(),
              [](const std::string& a, const std::string& b) { return temporal_less(a, b); });
  } else if (decl.type == VarType::nominal) {
    std::sort(values.begin(), values.end());
  } else {
    std::sort(values.begin(), values.end(),
              [](const std::string& a, const std::string& b) { return numeric_aware_less(a, b); });
  }
  if (has_missing) values.emplace_back(kMissingValue);
}

}  // namespace

TupleAssignment assign_tuples(const AnalysisTable& table, const std::vector<VariableDecl>& input) {
  std::vector<VariableDecl> decls = input;
  const bool declared_source =
      std::any_of(decls.begin(), decls.end(),
                  [](const VariableDecl& d) { return d.name == kTextSourceVariable; });
  if (table.has_text_source() && !declared_source) {
    decls.push_back({std::string(kTextSourceVariable), VarType::nominal, Semantics::general, {}, {}});
  }

  const std::size_t rows = table.row_count();
  std::vector<std::vector<std::string>> columns;
  TupleAssignment out;
  for (auto& decl : decls) {
    decl.validate();
    auto it = std::find(table.variable_names.begin(), table.variable_names.end(), decl.name);
    if (it == table.variable_names.end()) {
      throw Error(ErrorKind::UnknownVariableColumn,
                  "variable '" + decl.name + "' is not a selected column");
    }
    const auto& raw = table.variables[static_cast<std::size_t>(it - table.variable_names.begin())];
    std::vector<std::string> values(rows);

    if (!decl.is_numeric()) {
      for (std::size_t r = 0; r < rows; ++r) {
        values[r] = raw[r].empty() ? std::string(kMissingValue) : raw[r];
      }
    } else {
      std::vector<double> numbers;
      std::vector<std::size_t> numeric_rows;
      for (std::size_t r = 0; r < rows; ++r) {
        if (raw[r].empty()) {
          values[r] = std::string(kMissingValue);
          continue;
        }
        auto number = parse_number(raw[r]);
        if (!number) {
          throw Error(ErrorKind::NonNumericValue,
                      "variable '" + decl.name + "': value '" + raw[r] + "' at line " +
                          std::to_string(table.physical_lines[r]) + " is not a finite number");
        }
        if (decl.type == VarType::coordinate) {
          const double limit = decl.axis == Axis::latitude ? 90.0 : 180.0;
          if (std::abs(*number) > limit) {
            throw Error(ErrorKind::CoordinateOutOfRange,
                        "variable '" + decl.name + "': " + std::string(to_string(*decl.axis)) +
                            " " + raw[r] + " at line " + std::to_string(table.physical_lines[r]) +
                            " is out of range");
          }
        }
        numbers.push_back(*number);
        numeric_rows.push_back(r);
        values[r] = raw[r];
      }
      if (decl.is_binned() && !numbers.empty()) {
        Warnings bin_warnings;
        auto binned = bin_values(numbers, *decl.bins, &bin_warnings);
        for (auto& w : bin_warnings) out.warnings.push_back(decl.name + ": " + w);
        for (std::size_t i = 0; i < numeric_rows.size(); ++i) {
          values[numeric_rows[i]] = std::move(binned.labels[i]);
        }
      }
    }

    std::set<std::string> distinct(values.begin(), values.end());
    VariableInventory inventory{decl, {distinct.begin(), distinct.end()}};
    sort_inventory(decl, inventory.values);
    out.inventories.push_back(std::move(inventory));
    columns.push_back(std::move(values));
  }

  std::map<ValueTuple, std::size_t> index;
  out.row_tuple.resize(rows);
  ValueTuple tuple(decls.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t v = 0; v < decls.size(); ++v) tuple[v] = columns[v][r];
    auto [it, inserted] = index.try_emplace(tuple, out.tuples.size());
    if (inserted) out.tuples.push_back(tuple);
    out.row_tuple[r] = it->second;
  }
  return out;
}

}  // namespace lexivar
