#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexivar/counts.hpp"
#include "lexivar/error.hpp"

namespace lexivar {

/// tuple key -> unit -> score
using ScoreTable = std::map<std::string, std::map<std::string, double>>;

/// The eight PMI flavors are the combinations of these three flags. They are
/// applied in the order normalized, weighted, positive.
struct PmiFlavor {
  bool normalized = false;
  bool positive = false;
  bool weighted = false;

  bool operator==(const PmiFlavor&) const = default;
};

/// Class relevance is always normalized.
struct RelevanceFlags {
  bool positive = false;
  bool weighted = false;
};

ScoreTable pmi(const CountsTable& counts, PmiFlavor flavor, Warnings* warnings = nullptr);
ScoreTable class_relevance(const CountsTable& counts, RelevanceFlags flags);

enum class DiversityMeasure { ttr, root_ttr, log_ttr, maas };

/// V types over N tokens; nullopt where the measure is undefined (N = 0, or
/// N <= 1 for log_ttr and maas).
std::optional<double> diversity_score(std::size_t types, std::size_t tokens,
                                      DiversityMeasure measure);
std::map<std::string, std::optional<double>> lexical_diversity(const CountsTable& counts,
                                                               DiversityMeasure measure);
/// Same measure over every tuple pooled together.
std::optional<double> global_lexical_diversity(const CountsTable& counts, DiversityMeasure measure);

struct StatsRecord {
  Count num_texts = 0;
  Count num_units = 0;
  Count num_duplicates = 0;
  double avg_text_length = 0.0;  // preprocessed tokens per text
  Count vocab_size = 0;

  bool operator==(const StatsRecord&) const = default;
};

struct StatsReport {
  std::map<std::string, StatsRecord> per_tuple;
  StatsRecord global;
};

StatsReport basic_stats(const CountsTable& counts);

/// Keeps the k best units per tuple; ties go to the smaller unit key.
ScoreTable top_k(const ScoreTable& table, std::size_t k);

enum class MetricFamily { pmi, relevance, diversity, stats };

struct MetricSpec {
  std::string id;
  MetricFamily family = MetricFamily::pmi;
  PmiFlavor pmi_flavor;
  RelevanceFlags relevance;
  DiversityMeasure diversity = DiversityMeasure::ttr;

  /// Scores are per tuple rather than per (tuple, unit).
  bool tuple_level() const {
    return family == MetricFamily::diversity || family == MetricFamily::stats;
  }
  /// Every score is known to be >= 0.
  bool non_negative() const;
};

/// Accepts pmi, p_pmi, n_pmi, w_pmi, np_pmi, nw_pmi, pw_pmi, npw_pmi,
/// relevance, p_relevance, w_relevance, pw_relevance (also with an `n`
/// prefix, since relevance is always normalized), ttr, root_ttr, log_ttr,
/// maas, stats.
MetricSpec parse_metric(std::string_view id);
bool is_known_metric(std::string_view id);
std::vector<std::string> known_metric_ids();

}  // namespace lexivar
