#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lexivar/metrics.hpp"
#include "lexivar/results.hpp"
#include "lexivar/variables.hpp"

namespace lexivar {

enum class ChartType { bar, line, heatmap, scatter, geo_scatter, binned_map, choropleth };

/// Visual channels plus two widgets: `unit_filter` selects language units,
/// `dropdown` selects one value of a variable. `region` binds a nominal
/// variable to choropleth shapes.
enum class Channel { x, y, color, size, lat, lon, region, unit_filter, dropdown };

enum class UnitWidget { dropdown, regex_search };

std::string_view to_string(ChartType type);
std::string_view to_string(Channel channel);
std::string_view to_string(UnitWidget widget);

inline constexpr std::string_view kScoreRole = "__score__";
inline constexpr std::string_view kUnitRole = "__unit__";
inline constexpr std::size_t kMaxDimensions = 5;

struct ChannelAssignment {
  std::string role;  // a variable name, kScoreRole or kUnitRole
  Channel channel;

  bool operator==(const ChannelAssignment&) const = default;
};

struct ChartPlan {
  ChartType chart_type = ChartType::bar;
  std::string metric_id;
  std::vector<ChannelAssignment> assignments;
  UnitWidget unit_widget = UnitWidget::regex_search;
  /// Declared variables the plan encodes, in declaration order.
  std::vector<VariableDecl> variables;

  /// Variables + score + unit.
  std::size_t dimensions() const;
  std::vector<Channel> channels_of(std::string_view role) const;
  bool operator==(const ChartPlan&) const = default;
};

nlohmann::json to_json(const ChartPlan& plan);

/// Rule matrix from (metric, variable signature) to chart plans. Throws
/// UnsupportedCombination with a remediation hint.
std::vector<ChartPlan> plan_charts(const std::string& metric_id,
                                   const std::vector<VariableDecl>& decls,
                                   bool has_geometry = false);

/// Unanchored ECMAScript search over unit keys. Backreferences and
/// lookaround are rejected so the browser explorer can mirror the engine.
ScoreTable filter_units(const ScoreTable& table, const std::string& pattern);
/// Throws InvalidPattern when `pattern` is outside the portable subset.
void validate_pattern(const std::string& pattern);

/// Region geometry loaded from a GeoJSON FeatureCollection.
struct Geometry {
  nlohmann::json features = nlohmann::json::array();
  std::string key_property = "name";

  /// Feature whose key property equals `value` case-insensitively.
  bool has_feature(std::string_view value) const;
};

Geometry load_geometry(const std::string& path, const std::string& key_property = "name");
Geometry parse_geometry(std::string_view geojson, const std::string& key_property = "name");

struct VisualizerArgs {
  std::string output_dir = "charts";
  bool write_html = true;
  bool write_json = true;
  std::optional<std::size_t> top_k;
  std::vector<std::string> unit_filter_list;
  std::optional<std::string> filter_regex;
  std::optional<Geometry> geometry;    // choropleth regions
  std::optional<Geometry> background;  // backdrop for point and binned maps

  /// top_k and unit_filter_list are mutually exclusive.
  void validate() const;
};

struct ChartDocument {
  ChartPlan plan;
  nlohmann::json spec;  // Vega-Lite v5
  Warnings warnings;

  std::string file_stem() const;
};

/// Builds the Vega-Lite document for one plan. Returns nullopt (with an
/// EmptySlice warning) when filtering leaves nothing to draw.
std::optional<ChartDocument> render_chart(const ChartPlan& plan, const ResultsDocument& doc,
                                          const VisualizerArgs& args, Warnings& warnings);

/// Single-file page embedding `spec` and loading the Vega-Lite renderer.
std::string render_html(const ChartDocument& chart);

struct VisualizationResult {
  std::vector<ChartDocument> charts;
  std::vector<std::string> files;
  Warnings warnings;
};

/// Plans and renders every metric of `doc` (or only `metric_ids` when
/// non-empty) and writes `<metric>__<chart_type>.<ext>` into args.output_dir.
VisualizationResult visualize(const ResultsDocument& doc, const VisualizerArgs& args,
                              const std::vector<std::string>& metric_ids = {});

}  // namespace lexivar
