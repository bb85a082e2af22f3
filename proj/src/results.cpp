#include "lexivar/results.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace lexivar {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 5> kStatsFields{
    "avg_text_length", "num_duplicates", "num_texts", "num_units", "vocab_size"};

bool is_identifier(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

std::string child(const std::string& path, std::string_view key) {
  if (is_identifier(key)) return path + "." + std::string(key);
  return path + "[" + json(std::string(key)).dump() + "]";
}

std::string child(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

const json& field(const json& obj, const std::string& path, std::string_view key) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) throw SchemaError(child(path, key), "missing required field");
  return *it;
}

const json& object_at(const json& obj, const std::string& path, std::string_view key) {
  const auto& value = field(obj, path, key);
  if (!value.is_object()) throw SchemaError(child(path, key), "expected an object");
  return value;
}

const json& array_at(const json& obj, const std::string& path, std::string_view key) {
  const auto& value = field(obj, path, key);
  if (!value.is_array()) throw SchemaError(child(path, key), "expected an array");
  return value;
}

std::string string_at(const json& obj, const std::string& path, std::string_view key) {
  const auto& value = field(obj, path, key);
  if (!value.is_string()) throw SchemaError(child(path, key), "expected a string");
  return value.get<std::string>();
}

bool bool_at(const json& obj, const std::string& path, std::string_view key, bool fallback) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw SchemaError(child(path, key), "expected a boolean");
  return it->get<bool>();
}

std::size_t count_value(const json& value, const std::string& path) {
  if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0)) {
    throw SchemaError(path, "expected a non-negative integer");
  }
  return value.get<std::size_t>();
}

std::optional<std::size_t> optional_count_at(const json& obj, const std::string& path,
                                             std::string_view key) {
  auto it = obj.find(std::string(key));
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return count_value(*it, child(path, key));
}

std::vector<std::string> strings_at(const json& obj, const std::string& path, std::string_view key,
                                    bool required) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) {
    if (required) throw SchemaError(child(path, key), "missing required field");
    return {};
  }
  const auto p = child(path, key);
  if (!it->is_array()) throw SchemaError(p, "expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < it->size(); ++i) {
    if (!(*it)[i].is_string()) throw SchemaError(child(p, i), "expected a string");
    out.push_back((*it)[i].get<std::string>());
  }
  return out;
}

template <typename Fn>
auto rethrow_as_schema(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
}

json decl_to_json(const VariableDecl& decl) {
  json j;
  j["name"] = decl.name;
  j["type"] = std::string(to_string(decl.type));
  j["semantics"] = std::string(to_string(decl.semantics));
  j["bins"] = decl.bins ? json(*decl.bins) : json(nullptr);
  j["axis"] = decl.axis ? json(std::string(to_string(*decl.axis))) : json(nullptr);
  return j;
}

VariableDecl decl_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  VariableDecl decl;
  decl.name = string_at(j, path, "name");
  decl.type = rethrow_as_schema(child(path, "type"), [&] { return parse_var_type(string_at(j, path, "type")); });
  decl.semantics = rethrow_as_schema(child(path, "semantics"),
                                     [&] { return parse_semantics(string_at(j, path, "semantics")); });
  decl.bins = optional_count_at(j, path, "bins");
  if (auto it = j.find("axis"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError(child(path, "axis"), "expected a string or null");
    decl.axis = rethrow_as_schema(child(path, "axis"), [&] { return parse_axis(it->get<std::string>()); });
  }
  rethrow_as_schema(path, [&] { decl.validate(); });
  return decl;
}

json value_to_json(const MetricValue& value) {
  if (std::holds_alternative<std::monostate>(value)) return nullptr;
  if (const auto* score = std::get_if<double>(&value)) return *score;
  const auto& record = std::get<StatsRecord>(value);
  return json{{"avg_text_length", record.avg_text_length},
              {"num_duplicates", record.num_duplicates},
              {"num_texts", record.num_texts},
              {"num_units", record.num_units},
              {"vocab_size", record.vocab_size}};
}

MetricValue value_from_json(const json& j, const MetricSpec& spec, const std::string& path) {
  if (spec.family == MetricFamily::stats) {
    if (!j.is_object()) throw SchemaError(path, "expected a stats record object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (std::find(kStatsFields.begin(), kStatsFields.end(), it.key()) == kStatsFields.end()) {
        throw SchemaError(child(path, it.key()), "unknown stats field");
      }
    }
    StatsRecord record;
    record.num_texts = count_value(field(j, path, "num_texts"), child(path, "num_texts"));
    record.num_units = count_value(field(j, path, "num_units"), child(path, "num_units"));
    record.num_duplicates = count_value(field(j, path, "num_duplicates"), child(path, "num_duplicates"));
    record.vocab_size = count_value(field(j, path, "vocab_size"), child(path, "vocab_size"));
    const auto& avg = field(j, path, "avg_text_length");
    if (!avg.is_number()) throw SchemaError(child(path, "avg_text_length"), "expected a number");
    record.avg_text_length = avg.get<double>();
    return record;
  }
  if (j.is_null()) {
    if (spec.family != MetricFamily::diversity) {
      throw SchemaError(path, "null is only allowed for diversity measures");
    }
    return std::monostate{};
  }
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  const double value = j.get<double>();
  if (!std::isfinite(value)) throw SchemaError(path, "expected a finite number");
  return value;
}

json metadata_variable_to_json(const VariableInventory& inventory) {
  json j = decl_to_json(inventory.decl);
  j["values"] = inventory.values;
  return j;
}

}  // namespace

void InspectionConfig::validate() const {
  if (texts.empty() || texts.size() > 2) {
    throw Error(ErrorKind::ConfigError, "one or two text columns are required");
  }
  if (metrics.empty()) throw Error(ErrorKind::ConfigError, "at least one metric is required");
  std::set<std::string> seen;
  for (const auto& id : metrics) {
    if (!is_known_metric(id)) throw Error(ErrorKind::ConfigError, "unknown metric '" + id + "'");
    if (!seen.insert(id).second) throw Error(ErrorKind::ConfigError, "metric '" + id + "' listed twice");
  }
  std::set<std::string> names;
  for (auto decl : variables) {
    if (decl.name == kTextSourceVariable) {
      throw Error(ErrorKind::ConfigError,
                  std::string(kTextSourceVariable) + " is reserved for the implicit text-source variable");
    }
    try {
      decl.validate();
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigError, e.what());
    }
    if (!names.insert(decl.name).second) {
      throw Error(ErrorKind::ConfigError, "variable '" + decl.name + "' declared twice");
    }
  }
  try {
    unit.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
  if ((tokenizer.kind == TokenizerKind::custom) != tokenizer.custom_id.has_value()) {
    throw Error(ErrorKind::ConfigError, "custom_id must be set exactly when the tokenizer is custom");
  }
}

std::vector<VariableDecl> ResultsDocument::declarations() const {
  std::vector<VariableDecl> out;
  for (const auto& inventory : metadata.variables) out.push_back(inventory.decl);
  return out;
}

ScoreTable ResultsDocument::scores(const std::string& metric_id) const {
  ScoreTable out;
  auto it = metrics.find(metric_id);
  if (it == metrics.end()) return out;
  for (const auto& [tuple, units] : it->second) {
    for (const auto& [unit, value] : units) {
      if (const auto* score = std::get_if<double>(&value)) out[tuple][unit] = *score;
    }
  }
  return out;
}

double round_significant(double value) {
  if (!std::isfinite(value) || value == 0.0) return value == 0.0 ? 0.0 : value;
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.9g", value);
  return std::strtod(buf.data(), nullptr);
}

json config_to_json(const InspectionConfig& config) {
  json j;
  j["source"] = {{"location", config.source.location},
                 {"format", std::string(to_string(config.source.format))},
                 {"has_header", config.source.has_header}};
  json texts = json::array();
  for (const auto& ref : config.texts) {
    texts.push_back(ref.is_name() ? json(ref.name()) : json(ref.index()));
  }
  j["texts"] = texts;
  json variables = json::array();
  for (const auto& decl : config.variables) variables.push_back(decl_to_json(decl));
  j["variables"] = variables;
  j["tokenizer"] = {
      {"kind", config.tokenizer.kind == TokenizerKind::custom ? "custom" : "default_whitespace"},
      {"custom_id", config.tokenizer.custom_id ? json(*config.tokenizer.custom_id) : json(nullptr)}};
  j["preprocess"] = {{"lowercase", config.preprocess.lowercase},
                     {"stopword_files", config.preprocess.stopword_files},
                     {"extra_stopwords", config.preprocess.extra_stopwords}};
  j["unit"] = {{"mode", config.unit.mode == UnitMode::ngram ? "ngram" : "cooccurrence"},
               {"n", config.unit.n},
               {"window", config.unit.window ? json(*config.unit.window) : json(nullptr)},
               {"dedup_same_surface", config.unit.dedup_same_surface}};
  j["metrics"] = config.metrics;
  return j;
}

InspectionConfig config_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  InspectionConfig config;

  const auto& source = object_at(j, path, "source");
  const auto source_path = child(path, "source");
  config.source.location = string_at(source, source_path, "location");
  if (source.contains("format")) {
    config.source.format = rethrow_as_schema(child(source_path, "format"), [&] {
      return parse_table_format(string_at(source, source_path, "format"));
    });
  } else {
    config.source.format = DatasetSource::from_file(config.source.location).format;
  }
  config.source.has_header = bool_at(source, source_path, "has_header", true);

  const auto& texts = array_at(j, path, "texts");
  const auto texts_path = child(path, "texts");
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto& t = texts[i];
    if (t.is_string()) {
      config.texts.emplace_back(t.get<std::string>());
    } else {
      config.texts.emplace_back(count_value(t, child(texts_path, i)));
    }
  }

  if (auto it = j.find("variables"); it != j.end()) {
    const auto vars_path = child(path, "variables");
    if (!it->is_array()) throw SchemaError(vars_path, "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      config.variables.push_back(decl_from_json((*it)[i], child(vars_path, i)));
    }
  }

  if (auto it = j.find("tokenizer"); it != j.end()) {
    const auto tok_path = child(path, "tokenizer");
    if (!it->is_object()) throw SchemaError(tok_path, "expected an object");
    const auto kind = it->contains("kind") ? string_at(*it, tok_path, "kind") : "default_whitespace";
    if (kind == "custom") {
      config.tokenizer = TokenizerSpec::custom(string_at(*it, tok_path, "custom_id"));
    } else if (kind != "default_whitespace") {
      throw SchemaError(child(tok_path, "kind"), "expected 'default_whitespace' or 'custom'");
    }
  }

  if (auto it = j.find("preprocess"); it != j.end()) {
    const auto pre_path = child(path, "preprocess");
    if (!it->is_object()) throw SchemaError(pre_path, "expected an object");
    config.preprocess.lowercase = bool_at(*it, pre_path, "lowercase", false);
    config.preprocess.stopword_files = strings_at(*it, pre_path, "stopword_files", false);
    config.preprocess.extra_stopwords = strings_at(*it, pre_path, "extra_stopwords", false);
  }

  if (auto it = j.find("unit"); it != j.end()) {
    const auto unit_path = child(path, "unit");
    if (!it->is_object()) throw SchemaError(unit_path, "expected an object");
    const auto mode = it->contains("mode") ? string_at(*it, unit_path, "mode") : "ngram";
    if (mode == "ngram") {
      config.unit.mode = UnitMode::ngram;
    } else if (mode == "cooccurrence") {
      config.unit.mode = UnitMode::cooccurrence;
    } else {
      throw SchemaError(child(unit_path, "mode"), "expected 'ngram' or 'cooccurrence'");
    }
    config.unit.n = optional_count_at(*it, unit_path, "n").value_or(1);
    config.unit.window = optional_count_at(*it, unit_path, "window");
    config.unit.dedup_same_surface = bool_at(*it, unit_path, "dedup_same_surface", false);
  }

  config.metrics = strings_at(j, path, "metrics", true);
  rethrow_as_schema(path, [&] { config.validate(); });
  return config;
}

json to_json(const ResultsDocument& doc) {
  json j = doc.extra.is_object() ? doc.extra : json::object();
  j["schema"] = doc.schema;

  json meta;
  meta["tool"] = {{"name", doc.metadata.tool_name}, {"version", doc.metadata.tool_version}};
  meta["created"] = doc.metadata.created;
  meta["config"] = config_to_json(doc.metadata.config);
  json variables = json::array();
  for (const auto& inventory : doc.metadata.variables) {
    variables.push_back(metadata_variable_to_json(inventory));
  }
  meta["variables"] = variables;
  meta["metrics"] = doc.metadata.metrics;
  meta["row_count"] = doc.metadata.row_count;
  meta["vocab_size"] = doc.metadata.vocab_size;
  meta["warnings"] = doc.metadata.warnings;
  j["metadata"] = meta;

  json metrics = json::object();
  for (const auto& [id, result] : doc.metrics) {
    json per_tuple = json::object();
    for (const auto& [tuple, units] : result) {
      json per_unit = json::object();
      for (const auto& [unit, value] : units) per_unit[unit] = value_to_json(value);
      per_tuple[tuple] = per_unit;
    }
    metrics[id] = per_tuple;
  }
  j["metrics"] = metrics;

  json global = json::object();
  for (const auto& [id, value] : doc.global) global[id] = value_to_json(value);
  j["global"] = global;
  return j;
}

std::string serialize(const ResultsDocument& doc) { return to_json(doc).dump(2) + "\n"; }

ResultsDocument from_json(const json& j) {
  const std::string root = "$";
  if (!j.is_object()) throw SchemaError(root, "expected an object");
  ResultsDocument doc;

  const auto schema = string_at(j, root, "schema");
  if (schema != kSchemaVersion) {
    throw SchemaError(child(root, "schema"), "unsupported schema version '" + schema + "'");
  }
  doc.schema = schema;

  const auto& meta = object_at(j, root, "metadata");
  const auto meta_path = child(root, "metadata");
  const auto& tool = object_at(meta, meta_path, "tool");
  doc.metadata.tool_name = string_at(tool, child(meta_path, "tool"), "name");
  doc.metadata.tool_version = string_at(tool, child(meta_path, "tool"), "version");
  doc.metadata.created = string_at(meta, meta_path, "created");
  doc.metadata.config = config_from_json(field(meta, meta_path, "config"), child(meta_path, "config"));

  const auto& variables = array_at(meta, meta_path, "variables");
  const auto vars_path = child(meta_path, "variables");
  for (std::size_t i = 0; i < variables.size(); ++i) {
    const auto item_path = child(vars_path, i);
    VariableInventory inventory;
    inventory.decl = decl_from_json(variables[i], item_path);
    inventory.values = strings_at(variables[i], item_path, "values", true);
    doc.metadata.variables.push_back(std::move(inventory));
  }

  doc.metadata.metrics = strings_at(meta, meta_path, "metrics", true);
  const auto metric_ids_path = child(meta_path, "metrics");
  if (doc.metadata.metrics.empty()) throw SchemaError(metric_ids_path, "metric list is empty");
  std::map<std::string, MetricSpec> specs;
  for (std::size_t i = 0; i < doc.metadata.metrics.size(); ++i) {
    const auto& id = doc.metadata.metrics[i];
    auto spec = rethrow_as_schema(child(metric_ids_path, i), [&] { return parse_metric(id); });
    if (!specs.emplace(id, spec).second) throw SchemaError(child(metric_ids_path, i), "duplicate metric");
  }
  doc.metadata.row_count = count_value(field(meta, meta_path, "row_count"), child(meta_path, "row_count"));
  doc.metadata.vocab_size = count_value(field(meta, meta_path, "vocab_size"), child(meta_path, "vocab_size"));
  doc.metadata.warnings = strings_at(meta, meta_path, "warnings", true);

  const auto& metrics = object_at(j, root, "metrics");
  const auto metrics_path = child(root, "metrics");
  for (auto it = metrics.begin(); it != metrics.end(); ++it) {
    if (!specs.contains(it.key())) {
      throw SchemaError(child(metrics_path, it.key()), "metric not listed in metadata.metrics");
    }
  }
  const std::size_t arity = doc.metadata.variables.size();
  for (const auto& [id, spec] : specs) {
    const auto& per_tuple = object_at(metrics, metrics_path, id);
    const auto id_path = child(metrics_path, id);
    MetricResult result;
    for (auto t = per_tuple.begin(); t != per_tuple.end(); ++t) {
      const auto tuple_path = child(id_path, t.key());
      rethrow_as_schema(tuple_path, [&] { return deserialize_tuple(t.key(), arity); });
      if (!t->is_object()) throw SchemaError(tuple_path, "expected an object of unit scores");
      auto& units = result[t.key()];
      for (auto u = t->begin(); u != t->end(); ++u) {
        units.emplace(u.key(), value_from_json(*u, spec, child(tuple_path, u.key())));
      }
    }
    doc.metrics.emplace(id, std::move(result));
  }

  if (auto it = j.find("global"); it != j.end()) {
    const auto global_path = child(root, "global");
    if (!it->is_object()) throw SchemaError(global_path, "expected an object");
    for (auto g = it->begin(); g != it->end(); ++g) {
      auto spec = specs.find(g.key());
      if (spec == specs.end() || !spec->second.tuple_level()) {
        throw SchemaError(child(global_path, g.key()), "not a tuple-level metric of this document");
      }
      doc.global.emplace(g.key(), value_from_json(*g, spec->second, child(global_path, g.key())));
    }
  }

  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& key = it.key();
    if (key != "schema" && key != "metadata" && key != "metrics" && key != "global") {
      doc.extra[key] = *it;
    }
  }
  return doc;
}

ResultsDocument deserialize(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  return from_json(j);
}

ResultsDocument read_results_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileNotFound, "results file not found: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize(buffer.str());
}

void write_results_file(const ResultsDocument& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write results file: " + path);
  out << serialize(doc);
  if (!out) throw Error(ErrorKind::IoError, "failed writing results file: " + path);
}

}  // namespace lexivar
