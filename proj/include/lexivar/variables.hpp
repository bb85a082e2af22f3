#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexivar/corpus.hpp"
#include "lexivar/error.hpp"

namespace lexivar {

enum class VarType { nominal, ordinal, quantitative, coordinate };
enum class Semantics { temporal, spatial, general };
enum class Axis { latitude, longitude };

std::string_view to_string(VarType type);
std::string_view to_string(Semantics semantics);
std::string_view to_string(Axis axis);
VarType parse_var_type(std::string_view text);
Semantics parse_semantics(std::string_view text);
Axis parse_axis(std::string_view text);

/// Value used for empty variable cells.
inline constexpr std::string_view kMissingValue = "\xE2\x88\x85";  // U+2205 EMPTY SET

struct VariableDecl {
  std::string name;
  VarType type = VarType::nominal;
  Semantics semantics = Semantics::general;
  std::optional<std::size_t> bins;
  std::optional<Axis> axis;  // coordinate only

  bool is_binned() const { return bins.has_value(); }
  bool is_numeric() const { return type == VarType::quantitative || type == VarType::coordinate; }
  /// Checks the type/semantics/bins/axis rules. For coordinates without an
  /// explicit axis, infers one from the name (lat*, lon*/lng*).
  void validate();
  bool operator==(const VariableDecl&) const = default;
};

/// Parses `NAME:TYPE:SEMANTICS[:bins=K][:axis=latitude|longitude]`.
VariableDecl parse_variable_decl(std::string_view text);

/// One value per declared variable, in declaration order.
using ValueTuple = std::vector<std::string>;

/// Joins values with `::`. Backslashes and colons inside values are
/// backslash-escaped, so `a::b` inside a value becomes `a\:\:b` and the
/// encoding stays injective.
std::string serialize_tuple(const ValueTuple& tuple);
ValueTuple deserialize_tuple(std::string_view key);
/// Like above, but checks arity; the empty key is the zero-arity tuple.
ValueTuple deserialize_tuple(std::string_view key, std::size_t arity);

struct BinScheme {
  double min = 0.0;
  double max = 0.0;
  std::size_t k = 1;

  double width() const { return (max - min) / static_cast<double>(k); }
  std::size_t index_of(double value) const;
  std::string label(std::size_t index) const;
};

struct BinnedValues {
  BinScheme scheme;
  std::vector<std::size_t> indices;
  std::vector<std::string> labels;
};

/// Equal-width binning over the data range. A zero-width range puts every
/// value in bin 0 and records a warning.
BinnedValues bin_values(const std::vector<double>& values, std::size_t k,
                        Warnings* warnings = nullptr);

/// Parses `[lo, hi)` / `[lo, hi]` bin labels.
std::optional<std::pair<double, double>> parse_bin_label(std::string_view label);

/// Numbers compare numerically, everything else by code point; numbers sort first.
bool numeric_aware_less(std::string_view a, std::string_view b);
/// ISO-8601 date/datetime, then numeric, then code point.
bool temporal_less(std::string_view a, std::string_view b);

struct VariableInventory {
  VariableDecl decl;
  std::vector<std::string> values;  // distinct values in display order

  bool operator==(const VariableInventory&) const = default;
};

struct TupleAssignment {
  std::vector<ValueTuple> tuples;        // distinct tuples, in first-seen order
  std::vector<std::size_t> row_tuple;    // logical row -> index into `tuples`
  std::vector<VariableInventory> inventories;
  Warnings warnings;

  std::vector<std::string> tuple_keys() const;
};

/// `decls` must name the table's variable columns in order (including the
/// implicit text-source variable when present).
TupleAssignment assign_tuples(const AnalysisTable& table, const std::vector<VariableDecl>& decls);

}  // namespace lexivar
