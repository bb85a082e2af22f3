#include "lexivar/inspector.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <thread>

namespace lexivar {

namespace {

template <typename Fn>
auto stage(std::string_view name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.what());
  }
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

StatsRecord rounded(StatsRecord record) {
  record.avg_text_length = round_significant(record.avg_text_length);
  return record;
}

MetricValue rounded(std::optional<double> score) {
  if (!score) return std::monostate{};
  return round_significant(*score);
}

}  // namespace

std::size_t resolve_thread_count(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LEXIVAR_THREADS")) {
    std::size_t value = 0;
    const std::string_view text(env);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && ptr == text.data() + text.size() && value > 0) return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ResultsDocument run_inspection(const InspectionConfig& input, const RunOptions& options) {
  stage("config", [&] { input.validate(); });
  InspectionConfig config = input;
  for (auto& decl : config.variables) decl.validate();  // fills inferred coordinate axes

  const RawTable raw = stage("load", [&] { return load_dataset(config.source); });

  std::vector<ColumnRef> variable_refs;
  for (const auto& decl : config.variables) variable_refs.emplace_back(decl.name);
  const AnalysisTable table =
      stage("select", [&] { return select_columns(raw, config.texts, variable_refs); });

  const TupleAssignment assignment =
      stage("variables", [&] { return assign_tuples(table, config.variables); });
  const auto tuple_keys = assignment.tuple_keys();

  const Preprocessor preprocessor =
      stage("preprocess", [&] { return Preprocessor(config.preprocess); });
  if (config.tokenizer.kind == TokenizerKind::custom) {
    stage("tokenize", [&] { TokenizerRegistry::instance().get(*config.tokenizer.custom_id); });
  }

  // Contiguous row shards, merged in shard order.
  const std::size_t rows = table.row_count();
  const std::size_t shards = std::min(resolve_thread_count(options.threads), rows);
  std::vector<CountsTable> partial(shards);
  std::vector<std::exception_ptr> failures(shards);
  auto work = [&](std::size_t shard) {
    try {
      const std::size_t begin = rows * shard / shards;
      const std::size_t end = rows * (shard + 1) / shards;
      for (std::size_t r = begin; r < end; ++r) {
        const auto& text = table.texts[r];
        TokenList tokens = stage("tokenize", [&] { return tokenize(text, config.tokenizer); });
        tokens = preprocessor.apply(std::move(tokens));
        UnitBag bag = stage("unitize", [&] { return build_units(tokens, config.unit); });
        partial[shard].add_row(tuple_keys[assignment.row_tuple[r]], bag, tokens, text);
      }
    } catch (...) {
      failures[shard] = std::current_exception();
    }
  };
  if (shards == 1) {
    work(0);
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(shards);
    for (std::size_t s = 0; s < shards; ++s) workers.emplace_back(work, s);
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  CountsTable counts = std::move(partial.front());
  for (std::size_t s = 1; s < shards; ++s) counts.merge(partial[s]);

  ResultsDocument doc;
  doc.metadata.created = options.pin_timestamp ? std::string(kPinnedTimestamp) : utc_now();
  doc.metadata.config = config;
  doc.metadata.config.source.inline_text.reset();
  doc.metadata.variables = assignment.inventories;
  doc.metadata.metrics = config.metrics;
  doc.metadata.row_count = rows;
  doc.metadata.vocab_size = counts.vocab_size();
  doc.metadata.warnings = assignment.warnings;

  const std::string all_units(kAllUnits);
  for (const auto& id : config.metrics) {
    const MetricSpec spec = parse_metric(id);
    MetricResult result;
    switch (spec.family) {
      case MetricFamily::pmi:
      case MetricFamily::relevance: {
        ScoreTable scores = stage("metrics", [&] {
          return spec.family == MetricFamily::pmi
                     ? pmi(counts, spec.pmi_flavor, &doc.metadata.warnings)
                     : class_relevance(counts, spec.relevance);
        });
        for (auto& [tuple, units] : scores) {
          auto& out = result[tuple];
          for (auto& [unit, score] : units) out.emplace(unit, round_significant(score));
        }
        break;
      }
      case MetricFamily::diversity: {
        for (const auto& [tuple, score] : lexical_diversity(counts, spec.diversity)) {
          result[tuple].emplace(all_units, rounded(score));
        }
        doc.global.emplace(id, rounded(global_lexical_diversity(counts, spec.diversity)));
        break;
      }
      case MetricFamily::stats: {
        const StatsReport report = basic_stats(counts);
        for (const auto& [tuple, record] : report.per_tuple) {
          result[tuple].emplace(all_units, rounded(record));
        }
        doc.global.emplace(id, rounded(report.global));
        break;
      }
    }
    doc.metrics.emplace(id, std::move(result));
  }
  std::sort(doc.metadata.warnings.begin(), doc.metadata.warnings.end());
  doc.metadata.warnings.erase(std::unique(doc.metadata.warnings.begin(), doc.metadata.warnings.end()),
                              doc.metadata.warnings.end());
  return doc;
}

}  // namespace lexivar
