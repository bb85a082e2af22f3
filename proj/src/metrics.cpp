#include "lexivar/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace lexivar {

ScoreTable pmi(const CountsTable& counts, PmiFlavor flavor, Warnings* warnings) {
  if (counts.total == 0) throw Error(ErrorKind::EmptyCorpus, "cannot compute PMI on an empty corpus");
  const double n = static_cast<double>(counts.total);
  bool degenerate = false;

  ScoreTable out;
  for (const auto& [tuple, units] : counts.joint) {
    const double f_v = static_cast<double>(counts.tuple_marginal.at(tuple));
    auto& scores = out[tuple];
    for (const auto& [unit, joint] : units) {
      if (joint == 0) continue;
      const double f_uv = static_cast<double>(joint);
      const double f_u = static_cast<double>(counts.unit_marginal.at(unit));
      double score = std::log2((f_uv * n) / (f_u * f_v));
      if (flavor.normalized) {
        const double h = -std::log2(f_uv / n);
        if (h == 0.0) {
          score = 0.0;
          degenerate = true;
        } else {
          score /= h;
        }
      }
      if (flavor.weighted) score *= f_uv / f_v;
      if (flavor.positive) score = std::max(score, 0.0);
      scores.emplace(unit, score);
    }
    if (scores.empty()) out.erase(tuple);
  }
  if (degenerate && warnings) {
    warnings->push_back("DegenerateNormalization: a single (unit, tuple) pair covers the whole "
                        "corpus; its normalized PMI is reported as 0");
  }
  return out;
}

ScoreTable class_relevance(const CountsTable& counts, RelevanceFlags flags) {
  if (counts.total == 0) {
    throw Error(ErrorKind::EmptyCorpus, "cannot compute class relevance on an empty corpus");
  }
  std::vector<std::string> classes;
  for (const auto& [tuple, count] : counts.tuple_marginal) classes.push_back(tuple);
  if (classes.size() < 2) {
    throw Error(ErrorKind::SingleClass, "class relevance needs at least two distinct tuples, got " +
                                            std::to_string(classes.size()));
  }
  const double num_classes = static_cast<double>(classes.size());
  const double vocab = static_cast<double>(counts.vocab_size());
  const double log_classes = std::log2(num_classes);

  static const KeyedBy<Count> kEmpty;
  std::vector<const KeyedBy<Count>*> rows;
  std::vector<double> denominators;
  std::vector<double> max_in_class;
  for (const auto& c : classes) {
    auto it = counts.joint.find(c);
    const auto* row = it == counts.joint.end() ? &kEmpty : &it->second;
    rows.push_back(row);
    denominators.push_back(static_cast<double>(counts.tuple_marginal.at(c)) + vocab);
    Count best = 0;
    for (const auto& [unit, count] : *row) best = std::max(best, count);
    max_in_class.push_back(static_cast<double>(best));
  }

  auto smoothed = [&](std::size_t c, const std::string& unit) {
    auto it = rows[c]->find(unit);
    const double f = it == rows[c]->end() ? 0.0 : static_cast<double>(it->second);
    return (f + 1.0) / denominators[c];
  };

  ScoreTable out;
  for (const auto& [unit, marginal] : counts.unit_marginal) {
    double share_total = 0.0;
    for (std::size_t c = 0; c < classes.size(); ++c) share_total += smoothed(c, unit);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      auto it = rows[c]->find(unit);
      if (it == rows[c]->end() || it->second == 0) continue;
      const double share = smoothed(c, unit) / share_total;
      double score = std::log2(share * num_classes) / log_classes;
      if (flags.weighted) score *= static_cast<double>(it->second) / max_in_class[c];
      if (flags.positive) score = std::max(score, 0.0);
      out[classes[c]].emplace(unit, score);
    }
  }
  return out;
}

std::optional<double> diversity_score(std::size_t types, std::size_t tokens,
                                      DiversityMeasure measure) {
  if (tokens == 0) return std::nullopt;
  const double v = static_cast<double>(types);
  const double n = static_cast<double>(tokens);
  switch (measure) {
    case DiversityMeasure::ttr: return v / n;
    case DiversityMeasure::root_ttr: return v / std::sqrt(n);
    case DiversityMeasure::log_ttr:
      if (tokens <= 1) return std::nullopt;
      return std::log(v) / std::log(n);
    case DiversityMeasure::maas: {
      if (tokens <= 1) return std::nullopt;
      const double log_n = std::log10(n);
      return (log_n - std::log10(v)) / (log_n * log_n);
    }
  }
  return std::nullopt;
}

std::map<std::string, std::optional<double>> lexical_diversity(const CountsTable& counts,
                                                               DiversityMeasure measure) {
  std::map<std::string, std::optional<double>> out;
  for (const auto& [tuple, texts] : counts.texts_per_tuple) {
    std::size_t types = 0;
    std::size_t tokens = 0;
    if (auto it = counts.token_freq.find(tuple); it != counts.token_freq.end()) {
      types = it->second.size();
      for (const auto& [token, count] : it->second) tokens += count;
    }
    out.emplace(tuple, diversity_score(types, tokens, measure));
  }
  return out;
}

std::optional<double> global_lexical_diversity(const CountsTable& counts, DiversityMeasure measure) {
  std::map<std::string_view, Count> pooled;
  std::size_t tokens = 0;
  for (const auto& [tuple, freq] : counts.token_freq) {
    for (const auto& [token, count] : freq) {
      pooled[token] += count;
      tokens += count;
    }
  }
  return diversity_score(pooled.size(), tokens, measure);
}

StatsReport basic_stats(const CountsTable& counts) {
  StatsReport report;
  Count all_texts = 0;
  Count all_tokens = 0;
  Count all_dups = 0;
  for (const auto& [tuple, texts] : counts.texts_per_tuple) {
    StatsRecord record;
    record.num_texts = texts;
    if (auto it = counts.tuple_marginal.find(tuple); it != counts.tuple_marginal.end()) {
      record.num_units = it->second;
    }
    if (auto it = counts.duplicates_per_tuple.find(tuple); it != counts.duplicates_per_tuple.end()) {
      record.num_duplicates = it->second;
    }
    Count tokens = 0;
    if (auto it = counts.tokens_per_tuple.find(tuple); it != counts.tokens_per_tuple.end()) {
      tokens = it->second;
    }
    record.avg_text_length = texts == 0 ? 0.0 : static_cast<double>(tokens) / static_cast<double>(texts);
    if (auto it = counts.joint.find(tuple); it != counts.joint.end()) {
      record.vocab_size = static_cast<Count>(std::count_if(
          it->second.begin(), it->second.end(), [](const auto& entry) { return entry.second > 0; }));
    }
    all_texts += texts;
    all_tokens += tokens;
    all_dups += record.num_duplicates;
    report.per_tuple.emplace(tuple, record);
  }
  report.global.num_texts = all_texts;
  report.global.num_units = counts.total;
  report.global.num_duplicates = all_dups;
  report.global.avg_text_length =
      all_texts == 0 ? 0.0 : static_cast<double>(all_tokens) / static_cast<double>(all_texts);
  report.global.vocab_size = counts.vocab_size();
  return report;
}

ScoreTable top_k(const ScoreTable& table, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::ConfigError, "top-k requires k >= 1");
  ScoreTable out;
  for (const auto& [tuple, scores] : table) {
    std::vector<std::pair<std::string, double>> ranked(scores.begin(), scores.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (ranked.size() > k) ranked.resize(k);
    out.emplace(tuple, std::map<std::string, double>(ranked.begin(), ranked.end()));
  }
  return out;
}

bool MetricSpec::non_negative() const {
  switch (family) {
    case MetricFamily::pmi: return pmi_flavor.positive;
    case MetricFamily::relevance: return relevance.positive;
    case MetricFamily::diversity:
    case MetricFamily::stats: return true;
  }
  return false;
}

MetricSpec parse_metric(std::string_view id) {
  MetricSpec spec;
  spec.id = std::string(id);
  auto split = [&](std::string_view suffix) -> std::optional<std::string_view> {
    if (id == suffix) return std::string_view{};
    if (id.size() > suffix.size() + 1 && id.ends_with(suffix) && id[id.size() - suffix.size() - 1] == '_') {
      return id.substr(0, id.size() - suffix.size() - 1);
    }
    return std::nullopt;
  };
  // Flag prefixes must be a subsequence of "npw" in that order.
  auto parse_flags = [](std::string_view prefix, bool& n, bool& p, bool& w) {
    std::size_t i = 0;
    if (i < prefix.size() && prefix[i] == 'n') n = true, ++i;
    if (i < prefix.size() && prefix[i] == 'p') p = true, ++i;
    if (i < prefix.size() && prefix[i] == 'w') w = true, ++i;
    return i == prefix.size();
  };

  if (auto prefix = split("pmi")) {
    spec.family = MetricFamily::pmi;
    bool n = false, p = false, w = false;
    if (parse_flags(*prefix, n, p, w)) {
      spec.pmi_flavor = {n, p, w};
      return spec;
    }
  } else if (auto prefix = split("relevance")) {
    spec.family = MetricFamily::relevance;
    bool n = false, p = false, w = false;
    if (parse_flags(*prefix, n, p, w)) {
      spec.relevance = {p, w};
      return spec;
    }
  } else if (id == "ttr" || id == "root_ttr" || id == "log_ttr" || id == "maas") {
    spec.family = MetricFamily::diversity;
    spec.diversity = id == "ttr"        ? DiversityMeasure::ttr
                     : id == "root_ttr" ? DiversityMeasure::root_ttr
                     : id == "log_ttr"  ? DiversityMeasure::log_ttr
                                        : DiversityMeasure::maas;
    return spec;
  } else if (id == "stats") {
    spec.family = MetricFamily::stats;
    return spec;
  }
  throw Error(ErrorKind::ConfigError, "unknown metric '" + std::string(id) + "'");
}

bool is_known_metric(std::string_view id) {
  try {
    parse_metric(id);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::vector<std::string> known_metric_ids() {
  return {"pmi",         "p_pmi",        "n_pmi",        "w_pmi",         "np_pmi",
          "nw_pmi",      "pw_pmi",       "npw_pmi",      "relevance",     "p_relevance",
          "w_relevance", "pw_relevance", "n_relevance",  "np_relevance",  "nw_relevance",
          "npw_relevance", "ttr",        "root_ttr",     "log_ttr",       "maas",
          "stats"};
}

}  // namespace lexivar
