#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lexivar/corpus.hpp"
#include "lexivar/metrics.hpp"
#include "lexivar/unitizer.hpp"
#include "lexivar/variables.hpp"

namespace lexivar {

inline constexpr std::string_view kToolName = "lexivar";
inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kSchemaVersion = "1";
/// Unit key used by tuple-level metrics (diversity, stats).
inline constexpr std::string_view kAllUnits = "__all__";
inline constexpr std::string_view kPinnedTimestamp = "1970-01-01T00:00:00Z";

struct InspectionConfig {
  DatasetSource source;
  std::vector<ColumnRef> texts;
  std::vector<VariableDecl> variables;
  TokenizerSpec tokenizer;
  PreprocessOptions preprocess;
  UnitConfig unit;
  std::vector<std::string> metrics;

  /// Checks the type invariants; throws ConfigError.
  void validate() const;
  bool operator==(const InspectionConfig&) const = default;
};

/// null (undefined diversity), a score, or a stats record.
using MetricValue = std::variant<std::monostate, double, StatsRecord>;
/// tuple key -> unit -> value
using MetricResult = std::map<std::string, std::map<std::string, MetricValue>>;

struct ResultsMetadata {
  std::string tool_name{kToolName};
  std::string tool_version{kToolVersion};
  std::string created;
  InspectionConfig config;
  std::vector<VariableInventory> variables;  // including the implicit text-source variable
  std::vector<std::string> metrics;
  std::size_t row_count = 0;
  std::size_t vocab_size = 0;
  Warnings warnings;

  bool operator==(const ResultsMetadata&) const = default;
};

struct ResultsDocument {
  std::string schema{kSchemaVersion};
  ResultsMetadata metadata;
  std::map<std::string, MetricResult> metrics;
  /// Tuple-level metrics pooled over the whole corpus.
  std::map<std::string, MetricValue> global;
  /// Unknown top-level fields, kept verbatim for forward compatibility.
  nlohmann::json extra = nlohmann::json::object();

  std::vector<VariableDecl> declarations() const;
  /// Flattens one association metric into a score table (tuple-level
  /// metrics yield their single `__all__` unit).
  ScoreTable scores(const std::string& metric_id) const;

  bool operator==(const ResultsDocument&) const = default;
};

/// Rounds to 9 significant digits, the precision of the interchange format.
double round_significant(double value);

nlohmann::json config_to_json(const InspectionConfig& config);
/// Lenient: optional sections take their defaults. `path` prefixes error paths.
InspectionConfig config_from_json(const nlohmann::json& j, const std::string& path = "$");

nlohmann::json to_json(const ResultsDocument& doc);
/// Sorted keys, 2-space indent, trailing newline.
std::string serialize(const ResultsDocument& doc);
/// Validates while decoding; throws SchemaError naming the first bad path.
ResultsDocument from_json(const nlohmann::json& j);
ResultsDocument deserialize(std::string_view bytes);

ResultsDocument read_results_file(const std::string& path);
void write_results_file(const ResultsDocument& doc, const std::string& path);

}  // namespace lexivar
