#include "lexivar/cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "lexivar/charts.hpp"
#include "lexivar/inspector.hpp"

namespace lexivar {

namespace {

struct InspectFlags {
  std::optional<std::string> config_file;
  std::optional<std::string> data;
  std::optional<std::string> format;
  bool no_header = false;
  std::vector<std::string> text_cols;
  std::vector<std::string> vars;
  std::vector<std::string> metrics;
  std::optional<std::string> tokenizer;
  bool lowercase = false;
  std::vector<std::string> stopwords;
  std::vector<std::string> extra_stopwords;
  std::optional<std::size_t> ngram;
  std::optional<std::size_t> cooccurrence;
  std::optional<std::size_t> window;
  bool dedup = false;
  std::string output = "results.json";
  bool timestamp_zero = false;
  std::size_t threads = 0;
};

struct VisualizeFlags {
  std::string results;
  std::string output_dir = "charts";
  std::string formats = "html,json";
  std::optional<std::size_t> top_k;
  std::optional<std::string> filter_regex;
  std::vector<std::string> filter_units;
  std::optional<std::string> geometry;
  std::string geometry_key = "name";
  std::optional<std::string> background;
  std::vector<std::string> metrics;
};

/// Headerless tables address text columns by index.
ColumnRef column_ref(const std::string& text, bool has_header) {
  if (!has_header && !text.empty() && std::all_of(text.begin(), text.end(), ::isdigit)) {
    return ColumnRef(static_cast<std::size_t>(std::stoull(text)));
  }
  return ColumnRef(text);
}

InspectionConfig build_config(const InspectFlags& f) {
  InspectionConfig config;
  if (f.config_file) {
    std::ifstream in(*f.config_file, std::ios::binary);
    if (!in) throw Error(ErrorKind::FileNotFound, "config file not found: " + *f.config_file);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::ConfigError, "config file is not valid JSON: " + std::string(e.what()));
    }
    config = config_from_json(j);
  } else {
    if (!f.data) throw Error(ErrorKind::ConfigError, "--data is required");
    if (f.text_cols.empty()) throw Error(ErrorKind::ConfigError, "--text-col is required");
    if (f.metrics.empty()) throw Error(ErrorKind::ConfigError, "--metric is required");
  }

  // Flags override the config file.
  if (f.data) {
    const bool header = f.config_file && !f.no_header ? config.source.has_header : !f.no_header;
    config.source = DatasetSource::from_file(*f.data, header);
  }
  if (f.no_header) config.source.has_header = false;
  if (f.format) config.source.format = parse_table_format(*f.format);
  if (!f.text_cols.empty()) {
    config.texts.clear();
    for (const auto& t : f.text_cols) config.texts.push_back(column_ref(t, config.source.has_header));
  }
  if (!f.vars.empty()) {
    config.variables.clear();
    for (const auto& v : f.vars) config.variables.push_back(parse_variable_decl(v));
  }
  if (!f.metrics.empty()) config.metrics = f.metrics;
  if (f.tokenizer) {
    config.tokenizer = *f.tokenizer == "whitespace" ? TokenizerSpec::whitespace()
                                                    : TokenizerSpec::custom(*f.tokenizer);
  }
  if (f.lowercase) config.preprocess.lowercase = true;
  for (const auto& s : f.stopwords) config.preprocess.stopword_files.push_back(s);
  for (const auto& s : f.extra_stopwords) config.preprocess.extra_stopwords.push_back(s);

  if (f.ngram && f.cooccurrence) {
    throw Error(ErrorKind::ConfigError, "--ngram and --cooccurrence are mutually exclusive");
  }
  if (f.ngram) config.unit = UnitConfig::ngrams(*f.ngram);
  if (f.cooccurrence) {
    if (!f.window) throw Error(ErrorKind::ConfigError, "--cooccurrence requires --window");
    config.unit = UnitConfig::cooccurrences(*f.cooccurrence, *f.window, f.dedup);
  } else if (f.window || f.dedup) {
    if (config.unit.mode != UnitMode::cooccurrence) {
      throw Error(ErrorKind::ConfigError, "--window and --dedup only apply with --cooccurrence");
    }
    if (f.window) config.unit.window = *f.window;
    if (f.dedup) config.unit.dedup_same_surface = true;
  }
  return config;
}

std::size_t tuple_count(const ResultsDocument& doc) {
  std::set<std::string> tuples;
  for (const auto& [id, result] : doc.metrics) {
    for (const auto& [tuple, units] : result) tuples.insert(tuple);
  }
  return tuples.size();
}

int cmd_inspect(const InspectFlags& flags, std::ostream& out, std::ostream& err) {
  const InspectionConfig config = build_config(flags);
  RunOptions options;
  options.threads = flags.threads;
  options.pin_timestamp = flags.timestamp_zero;
  const ResultsDocument doc = run_inspection(config, options);
  write_results_file(doc, flags.output);
  for (const auto& w : doc.metadata.warnings) err << "warning: " << w << "\n";
  out << "rows=" << doc.metadata.row_count << " tuples=" << tuple_count(doc)
      << " vocab=" << doc.metadata.vocab_size << "\n";
  return kExitOk;
}

int cmd_visualize(const VisualizeFlags& flags, std::ostream& out, std::ostream& err) {
  VisualizerArgs args;
  args.output_dir = flags.output_dir;
  args.write_html = false;
  args.write_json = false;
  std::stringstream formats(flags.formats);
  for (std::string item; std::getline(formats, item, ',');) {
    if (item == "html") {
      args.write_html = true;
    } else if (item == "json") {
      args.write_json = true;
    } else {
      throw Error(ErrorKind::ConfigError, "unknown --format '" + item + "' (expected html, json)");
    }
  }
  args.top_k = flags.top_k;
  args.unit_filter_list = flags.filter_units;
  args.filter_regex = flags.filter_regex;
  args.validate();
  if (flags.geometry) args.geometry = load_geometry(*flags.geometry, flags.geometry_key);
  if (flags.background) args.background = load_geometry(*flags.background, flags.geometry_key);

  const ResultsDocument doc = read_results_file(flags.results);
  const auto result = visualize(doc, args, flags.metrics);
  for (const auto& w : result.warnings) err << "warning: " << w << "\n";
  out << "charts=" << result.charts.size() << " files=" << result.files.size()
      << " output_dir=" << args.output_dir << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Explore how language units associate with text variables", "lexivar"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  InspectFlags in;
  auto* inspect = app.add_subcommand("inspect", "Count units per variable tuple and score metrics");
  inspect->add_option("--config", in.config_file, "JSON inspection config (flags override it)");
  inspect->add_option("--data", in.data, "TSV/CSV dataset");
  inspect->add_option("--format", in.format, "Table format: tsv or csv (default: by extension)");
  inspect->add_flag("--no-header", in.no_header, "Dataset has no header row");
  inspect->add_option("--text-col", in.text_cols, "Text column name or index (1-2 times)");
  inspect->add_option("--var", in.vars, "NAME:TYPE:SEMANTICS[:bins=K][:axis=latitude|longitude]");
  inspect->add_option("--metric", in.metrics, "Metric id (repeatable)");
  inspect->add_option("--tokenizer", in.tokenizer, "Registered tokenizer id (default: whitespace)");
  inspect->add_flag("--lowercase", in.lowercase, "Lowercase tokens");
  inspect->add_option("--stopwords", in.stopwords, "Stopword file (repeatable)");
  inspect->add_option("--extra-stopword", in.extra_stopwords, "Additional stopword (repeatable)");
  inspect->add_option("--ngram", in.ngram, "Use n-grams of size N (default 1)");
  inspect->add_option("--cooccurrence", in.cooccurrence, "Use co-occurrences of N tokens");
  inspect->add_option("--window", in.window, "Co-occurrence window size");
  inspect->add_flag("--dedup", in.dedup, "Skip co-occurrences repeating one surface form");
  inspect->add_option("-o,--output", in.output, "Results file")->capture_default_str();
  inspect->add_flag("--timestamp-zero", in.timestamp_zero, "Pin the creation timestamp");
  inspect->add_option("--threads", in.threads, "Worker count (default: LEXIVAR_THREADS or all cores)");

  VisualizeFlags vis;
  auto* visualize_cmd = app.add_subcommand("visualize", "Render charts from a results file");
  visualize_cmd->add_option("--results", vis.results, "Results file")->required();
  visualize_cmd->add_option("--output-dir", vis.output_dir, "Chart directory")->capture_default_str();
  visualize_cmd->add_option("--format", vis.formats, "Comma-separated: html,json")->capture_default_str();
  visualize_cmd->add_option("--top-k", vis.top_k, "Keep the k best units per tuple");
  visualize_cmd->add_option("--filter-regex", vis.filter_regex, "Keep units matching the pattern");
  visualize_cmd->add_option("--filter-unit", vis.filter_units, "Keep this unit (repeatable)");
  visualize_cmd->add_option("--geometry", vis.geometry, "GeoJSON regions for choropleths");
  visualize_cmd->add_option("--geometry-key", vis.geometry_key, "Feature property matching region values")
      ->capture_default_str();
  visualize_cmd->add_option("--background", vis.background, "GeoJSON backdrop for point and binned maps");
  visualize_cmd->add_option("--metric", vis.metrics, "Only chart these metrics (repeatable)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n";
    return kExitUserError;
  }
  try {
    if (inspect->parsed()) return cmd_inspect(in, out, err);
    return cmd_visualize(vis, out, err);
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return kExitUserError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
}

}  // namespace lexivar
