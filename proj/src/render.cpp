#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "lexivar/charts.hpp"
#include "lexivar/unicode.hpp"

namespace lexivar {

using nlohmann::json;

namespace {

constexpr std::string_view kSchemaUrl = "https://vega.github.io/schema/vega-lite/v5.json";
constexpr std::string_view kUnitRegexParam = "unit_regex";
constexpr std::string_view kUnitSelectParam = "unit_select";
constexpr std::string_view kValueSelectParam = "value_select";

std::string field_name(std::size_t index) { return "v" + std::to_string(index); }

std::string geometry_key(std::string_view value) { return unicode::to_lower(value); }

struct SliceRow {
  std::string tuple;
  std::string unit;
  double score;
};

/// Flattened (tuple, unit, score) triples for one metric, filters applied.
std::vector<SliceRow> metric_slice(const ResultsDocument& doc, const MetricSpec& spec,
                                   const VisualizerArgs& args) {
  ScoreTable table;
  auto it = doc.metrics.find(spec.id);
  if (it != doc.metrics.end()) {
    for (const auto& [tuple, units] : it->second) {
      for (const auto& [unit, value] : units) {
        if (const auto* score = std::get_if<double>(&value)) {
          table[tuple][unit] = *score;
        } else if (const auto* record = std::get_if<StatsRecord>(&value)) {
          auto& row = table[tuple];
          row["avg_text_length"] = record->avg_text_length;
          row["num_duplicates"] = static_cast<double>(record->num_duplicates);
          row["num_texts"] = static_cast<double>(record->num_texts);
          row["num_units"] = static_cast<double>(record->num_units);
          row["vocab_size"] = static_cast<double>(record->vocab_size);
        }
      }
    }
  }

  if (!args.unit_filter_list.empty()) {
    const std::set<std::string> keep(args.unit_filter_list.begin(), args.unit_filter_list.end());
    for (auto& [tuple, units] : table) std::erase_if(units, [&](const auto& e) { return !keep.contains(e.first); });
  }
  if (args.filter_regex) table = filter_units(table, *args.filter_regex);
  if (args.top_k && !spec.tuple_level()) table = top_k(table, *args.top_k);

  std::vector<SliceRow> rows;
  for (const auto& [tuple, units] : table) {
    for (const auto& [unit, score] : units) rows.push_back({tuple, unit, score});
  }
  return rows;
}

json score_encoding(const MetricSpec& spec, bool as_color) {
  json enc = {{"field", "score"}, {"type", "quantitative"}, {"title", spec.id}};
  if (as_color) {
    enc["scale"] = spec.non_negative() ? json{{"scheme", "viridis"}}
                                       : json{{"scheme", "redblue"}, {"domainMid", 0}, {"reverse", true}};
  }
  return enc;
}

json category_encoding(const VariableInventory& inventory, std::size_t index) {
  const auto type = inventory.decl.type == VarType::nominal && inventory.decl.semantics != Semantics::temporal
                        ? "nominal"
                        : "ordinal";
  return {{"field", field_name(index)}, {"type", type}, {"title", inventory.decl.name},
          {"sort", inventory.values}};
}

const VariableInventory& inventory_of(const ResultsDocument& doc, const std::string& name,
                                      std::size_t& position) {
  for (std::size_t i = 0; i < doc.metadata.variables.size(); ++i) {
    if (doc.metadata.variables[i].decl.name == name) {
      position = i;
      return doc.metadata.variables[i];
    }
  }
  throw Error(ErrorKind::UnsupportedCombination,
              "plan variable '" + name + "' is not declared in the results document");
}

std::optional<double> to_number(const std::string& s) {
  if (s.empty() || s == kMissingValue) return std::nullopt;
  try {
    std::size_t used = 0;
    const double value = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return value;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

json unit_widget_param(UnitWidget widget, const std::vector<std::string>& units) {
  if (widget == UnitWidget::regex_search) {
    return {{"name", kUnitRegexParam}, {"value", ""},
            {"bind", {{"input", "text"}, {"name", "Unit (regex) "}}}};
  }
  return {{"name", kUnitSelectParam}, {"value", units.front()},
          {"bind", {{"input", "select"}, {"options", units}, {"name", "Unit "}}}};
}

json unit_widget_filter(UnitWidget widget) {
  if (widget == UnitWidget::regex_search) {
    return {{"filter", "!" + std::string(kUnitRegexParam) + " || test(regexp(" +
                           std::string(kUnitRegexParam) + "), datum.unit)"}};
  }
  return {{"filter", "datum.unit === " + std::string(kUnitSelectParam)}};
}

json geoshape_layer(const Geometry& geometry, std::string_view fill) {
  return {{"data", {{"values", geometry.features}}},
          {"mark", {{"type", "geoshape"}, {"fill", fill}, {"stroke", "#888888"}, {"strokeWidth", 0.5}}}};
}

}  // namespace

bool Geometry::has_feature(std::string_view value) const {
  const auto wanted = geometry_key(value);
  for (const auto& feature : features) {
    auto props = feature.find("properties");
    if (props == feature.end() || !props->is_object()) continue;
    auto key = props->find(key_property);
    if (key != props->end() && key->is_string() && geometry_key(key->get<std::string>()) == wanted) {
      return true;
    }
  }
  return false;
}

Geometry parse_geometry(std::string_view geojson, const std::string& key_property) {
  json j;
  try {
    j = json::parse(geojson.begin(), geojson.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::GeometryError, std::string("invalid GeoJSON: ") + e.what());
  }
  if (!j.is_object() || j.value("type", "") != "FeatureCollection" || !j.contains("features") ||
      !j["features"].is_array()) {
    throw Error(ErrorKind::GeometryError, "geometry must be a GeoJSON FeatureCollection");
  }
  Geometry geometry;
  geometry.key_property = key_property;
  for (auto feature : j["features"]) {
    if (!feature.is_object() || feature.value("type", "") != "Feature") {
      throw Error(ErrorKind::GeometryError, "every FeatureCollection member must be a Feature");
    }
    // Precomputed lowercase key for the case-insensitive lookup in the chart.
    auto& props = feature["properties"];
    if (!props.is_object()) props = json::object();
    if (auto key = props.find(key_property); key != props.end() && key->is_string()) {
      props["__key"] = geometry_key(key->get<std::string>());
    }
    geometry.features.push_back(std::move(feature));
  }
  return geometry;
}

Geometry load_geometry(const std::string& path, const std::string& key_property) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileNotFound, "geometry file not found: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_geometry(buffer.str(), key_property);
}

void VisualizerArgs::validate() const {
  if (top_k && !unit_filter_list.empty()) {
    throw Error(ErrorKind::ConfigError, "--top-k and --filter-unit are mutually exclusive");
  }
  if (top_k && *top_k == 0) throw Error(ErrorKind::ConfigError, "top-k must be at least 1");
  if (!write_html && !write_json) throw Error(ErrorKind::ConfigError, "no output format selected");
  if (filter_regex) validate_pattern(*filter_regex);
}

std::string ChartDocument::file_stem() const {
  return plan.metric_id + "__" + std::string(to_string(plan.chart_type));
}

std::optional<ChartDocument> render_chart(const ChartPlan& plan, const ResultsDocument& doc,
                                          const VisualizerArgs& args, Warnings& warnings) {
  const MetricSpec spec = parse_metric(plan.metric_id);
  const auto slice = metric_slice(doc, spec, args);

  ChartDocument chart;
  chart.plan = plan;

  // Locate plan variables inside the document's tuple layout.
  std::vector<std::size_t> positions;
  std::vector<const VariableInventory*> inventories;
  for (const auto& v : plan.variables) {
    std::size_t position = 0;
    inventories.push_back(&inventory_of(doc, v.name, position));
    positions.push_back(position);
  }
  const std::size_t arity = doc.metadata.variables.size();

  json values = json::array();
  std::set<std::string> units;
  std::size_t skipped_missing = 0;
  for (const auto& row : slice) {
    const ValueTuple tuple = deserialize_tuple(row.tuple, arity);
    json datum = {{"unit", row.unit}, {"score", row.score}};
    bool keep = true;
    for (std::size_t i = 0; i < plan.variables.size() && keep; ++i) {
      const auto& decl = inventories[i]->decl;
      const auto& value = tuple[positions[i]];
      if (decl.type == VarType::coordinate && decl.is_binned()) {
        auto range = parse_bin_label(value);
        if (!range) {
          keep = false;
          break;
        }
        datum[field_name(i) + "_lo"] = range->first;
        datum[field_name(i) + "_hi"] = range->second;
        datum[field_name(i)] = value;
      } else if (decl.is_numeric() && !decl.is_binned()) {
        auto number = to_number(value);
        if (!number) {
          keep = false;
          break;
        }
        datum[field_name(i)] = *number;
      } else {
        datum[field_name(i)] = value;
        if (plan.chart_type == ChartType::choropleth) datum["__key"] = geometry_key(value);
      }
    }
    if (!keep) {
      ++skipped_missing;
      continue;
    }
    units.insert(row.unit);
    values.push_back(std::move(datum));
  }
  if (skipped_missing > 0) {
    chart.warnings.push_back(std::to_string(skipped_missing) +
                             " rows without a numeric position were left out of " + chart.file_stem());
  }
  if (values.empty()) {
    warnings.push_back("EmptySlice: no data left to draw for " + chart.file_stem() + "; file skipped");
    return std::nullopt;
  }
  const std::vector<std::string> unit_list(units.begin(), units.end());

  json params = json::array({unit_widget_param(plan.unit_widget, unit_list)});
  json transform = json::array({unit_widget_filter(plan.unit_widget)});
  json encoding = json::object();
  json tooltip = json::array({{{"field", "unit"}, {"type", "nominal"}, {"title", "unit"}}});
  for (std::size_t i = 0; i < plan.variables.size(); ++i) {
    tooltip.push_back({{"field", field_name(i)}, {"title", plan.variables[i].name}});
  }
  tooltip.push_back({{"field", "score"}, {"type", "quantitative"}, {"title", spec.id}, {"format", ".4f"}});

  auto index_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < plan.variables.size(); ++i) {
      if (plan.variables[i].name == name) return i;
    }
    return std::size_t{0};
  };
  auto variable_axis = [&](std::size_t i) -> json {
    const auto& decl = plan.variables[i];
    if (decl.is_numeric() && !decl.is_binned()) {
      return {{"field", field_name(i)}, {"type", "quantitative"}, {"title", decl.name},
              {"scale", {{"zero", false}}}};
    }
    return category_encoding(*inventories[i], i);
  };

  json spec_json = {{"$schema", kSchemaUrl},
                    {"title", spec.id + (plan.variables.empty() ? "" : " by ") + [&] {
                       std::string names;
                       for (const auto& v : plan.variables) names += (names.empty() ? "" : ", ") + v.name;
                       return names;
                     }()},
                    {"usermeta", {{"lexivar", to_json(plan)}}}};

  auto finish_single = [&](json mark) {
    encoding["tooltip"] = tooltip;
    spec_json["data"] = {{"values", values}};
    spec_json["params"] = params;
    spec_json["transform"] = transform;
    spec_json["mark"] = std::move(mark);
    spec_json["encoding"] = encoding;
  };

  const auto is_geo = plan.chart_type == ChartType::geo_scatter ||
                      plan.chart_type == ChartType::binned_map ||
                      plan.chart_type == ChartType::choropleth;
  if (!is_geo) {
    spec_json["width"] = 600;
    spec_json["height"] = 360;
  } else {
    spec_json["width"] = 600;
    spec_json["height"] = 600;
    spec_json["projection"] = {{"type", "mercator"}};
  }

  for (const auto& a : plan.assignments) {
    if (a.channel == Channel::dropdown) {
      const auto i = index_of(a.role);
      const auto& options = inventories[i]->values;
      params.push_back({{"name", kValueSelectParam}, {"value", options.front()},
                        {"bind", {{"input", "select"}, {"options", options}, {"name", a.role + " "}}}});
      transform.push_back({{"filter", "datum." + field_name(i) + " === " + std::string(kValueSelectParam)}});
    }
  }

  switch (plan.chart_type) {
    case ChartType::bar: {
      if (plan.variables.empty()) {
        encoding["x"] = {{"field", "unit"}, {"type", "nominal"}, {"title", "unit"}, {"sort", "-y"}};
      } else {
        encoding["x"] = variable_axis(0);
        encoding["xOffset"] = {{"field", "unit"}, {"type", "nominal"}};
      }
      encoding["y"] = score_encoding(spec, false);
      finish_single({{"type", "bar"}});
      break;
    }
    case ChartType::line: {
      for (const auto& a : plan.assignments) {
        if (a.channel == Channel::x) encoding["x"] = variable_axis(index_of(a.role));
        if (a.channel == Channel::color) {
          encoding["color"] = a.role == kUnitRole
                                  ? json{{"field", "unit"}, {"type", "nominal"}, {"title", "unit"}}
                                  : category_encoding(*inventories[index_of(a.role)], index_of(a.role));
        }
      }
      encoding["y"] = score_encoding(spec, false);
      finish_single({{"type", "line"}, {"point", true}});
      break;
    }
    case ChartType::scatter: {
      encoding["x"] = variable_axis(0);
      encoding["y"] = score_encoding(spec, false);
      encoding["color"] = {{"field", "unit"}, {"type", "nominal"}, {"legend", nullptr}};
      finish_single({{"type", "point"}, {"filled", true}});
      break;
    }
    case ChartType::heatmap: {
      encoding["x"] = variable_axis(0);
      encoding["y"] = variable_axis(1);
      encoding["color"] = score_encoding(spec, true);
      finish_single({{"type", "rect"}});
      break;
    }
    case ChartType::geo_scatter:
    case ChartType::binned_map: {
      const std::size_t lat = plan.variables[0].axis == Axis::latitude ? 0 : 1;
      const std::size_t lon = 1 - lat;
      json point;
      json mark;
      if (plan.chart_type == ChartType::geo_scatter) {
        point["latitude"] = {{"field", field_name(lat)}, {"type", "quantitative"}};
        point["longitude"] = {{"field", field_name(lon)}, {"type", "quantitative"}};
        mark = {{"type", "circle"}, {"size", 40}, {"opacity", 0.8}};
      } else {
        point["latitude"] = {{"field", field_name(lat) + "_lo"}, {"type", "quantitative"}};
        point["latitude2"] = {{"field", field_name(lat) + "_hi"}};
        point["longitude"] = {{"field", field_name(lon) + "_lo"}, {"type", "quantitative"}};
        point["longitude2"] = {{"field", field_name(lon) + "_hi"}};
        mark = {{"type", "rect"}, {"opacity", 0.85}};
      }
      point["color"] = score_encoding(spec, true);
      point["tooltip"] = tooltip;
      json data_layer = {{"data", {{"values", values}}}, {"transform", transform},
                         {"mark", mark}, {"encoding", point}};
      if (args.background) {
        // Variable params must live at the top of a layered spec.
        spec_json["params"] = params;
        spec_json["layer"] = json::array({geoshape_layer(*args.background, "#eeeeee"), data_layer});
      } else {
        spec_json["data"] = data_layer["data"];
        spec_json["params"] = params;
        spec_json["transform"] = transform;
        spec_json["mark"] = mark;
        spec_json["encoding"] = point;
      }
      break;
    }
    case ChartType::choropleth: {
      if (!args.geometry) {
        throw Error(ErrorKind::GeometryError, "choropleth plan requires a geometry file");
      }
      const auto& inventory = *inventories[0];
      std::vector<std::string> missing;
      for (const auto& value : inventory.values) {
        if (value != kMissingValue && !args.geometry->has_feature(value)) missing.push_back(value);
      }
      if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        chart.warnings.push_back("GeometryMismatch: no feature with " + args.geometry->key_property +
                                 " matching: " + list);
      }
      json regions = {
          {"data", {{"values", values}}},
          {"transform", transform},
          {"mark", {{"type", "geoshape"}, {"stroke", "#444444"}, {"strokeWidth", 0.5}}},
          {"encoding", {{"shape", {{"field", "geo"}, {"type", "geojson"}}},
                        {"color", score_encoding(spec, true)},
                        {"tooltip", tooltip}}}};
      regions["transform"].push_back(
          {{"lookup", "__key"},
           {"from", {{"data", {{"values", args.geometry->features}}}, {"key", "properties.__key"}}},
           {"as", "geo"}});
      regions["transform"].push_back({{"filter", "isValid(datum.geo)"}});
      spec_json["params"] = params;
      spec_json["layer"] = json::array({geoshape_layer(*args.geometry, "#f2f2f2"), regions});
      break;
    }
  }

  chart.spec = std::move(spec_json);
  return chart;
}

std::string render_html(const ChartDocument& chart) {
  std::string embedded = chart.spec.dump();
  // Keep the JSON from closing the surrounding script element.
  for (std::size_t pos = 0; (pos = embedded.find("</", pos)) != std::string::npos; pos += 3) {
    embedded.replace(pos, 2, "<\\/");
  }
  std::ostringstream html;
  html << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
       << "<title>" << chart.file_stem() << "</title>\n"
       << "<script src=\"https://cdn.jsdelivr.net/npm/vega@5\"></script>\n"
       << "<script src=\"https://cdn.jsdelivr.net/npm/vega-lite@5\"></script>\n"
       << "<script src=\"https://cdn.jsdelivr.net/npm/vega-embed@6\"></script>\n"
       << "</head>\n<body>\n<div id=\"chart\"></div>\n"
       << "<script type=\"application/json\" id=\"spec\">" << embedded << "</script>\n"
       << "<script>vegaEmbed('#chart', JSON.parse(document.getElementById('spec').textContent));</script>\n"
       << "</body>\n</html>\n";
  return html.str();
}

VisualizationResult visualize(const ResultsDocument& doc, const VisualizerArgs& args,
                              const std::vector<std::string>& metric_ids) {
  args.validate();
  VisualizationResult result;
  const auto ids = metric_ids.empty() ? doc.metadata.metrics : metric_ids;
  const auto decls = doc.declarations();
  for (const auto& id : ids) {
    if (!doc.metrics.contains(id)) {
      throw Error(ErrorKind::ConfigError, "metric '" + id + "' is not in the results document");
    }
    for (const auto& plan : plan_charts(id, decls, args.geometry.has_value())) {
      auto chart = render_chart(plan, doc, args, result.warnings);
      if (!chart) continue;
      for (const auto& w : chart->warnings) result.warnings.push_back(w);
      result.charts.push_back(std::move(*chart));
    }
  }

  // The same geometry mismatch shows up once per metric; report it once.
  std::set<std::string> seen;
  std::erase_if(result.warnings, [&](const std::string& w) { return !seen.insert(w).second; });

  std::error_code ec;
  std::filesystem::create_directories(args.output_dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create output directory " + args.output_dir);
  auto write = [&](const std::string& name, const std::string& content) {
    const auto path = (std::filesystem::path(args.output_dir) / name).string();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << content)) throw Error(ErrorKind::IoError, "cannot write " + path);
    result.files.push_back(path);
  };
  for (const auto& chart : result.charts) {
    if (args.write_json) write(chart.file_stem() + ".json", chart.spec.dump(2) + "\n");
    if (args.write_html) write(chart.file_stem() + ".html", render_html(chart));
  }
  return result;
}

}  // namespace lexivar
