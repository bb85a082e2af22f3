#include "lexivar/counts.hpp"

#include "lexivar/error.hpp"

namespace lexivar {

std::set<std::string> CountsTable::vocab() const {
  std::set<std::string> out;
  for (const auto& [unit, count] : unit_marginal) out.insert(unit);
  return out;
}

void CountsTable::add_row(const std::string& tuple, const UnitBag& units, const TokenList& tokens,
                          const std::string& text) {
  auto& joint_row = joint[tuple];
  Count row_total = 0;
  for (const auto& [unit, count] : units.units) {
    joint_row[unit] += count;
    unit_marginal[unit] += count;
    row_total += count;
  }
  tuple_marginal[tuple] += row_total;
  total += row_total;

  ++texts_per_tuple[tuple];
  tokens_per_tuple[tuple] += units.token_count;
  auto& freq = token_freq[tuple];
  for (const auto& token : tokens) ++freq[token];

  auto& seen = text_occurrences[tuple][text];
  auto& dups = duplicates_per_tuple[tuple];
  if (seen > 0) ++dups;
  ++seen;
}

void CountsTable::merge(const CountsTable& other) {
  for (const auto& [tuple, units] : other.joint) {
    auto& mine = joint[tuple];
    for (const auto& [unit, count] : units) mine[unit] += count;
  }
  for (const auto& [unit, count] : other.unit_marginal) unit_marginal[unit] += count;
  for (const auto& [tuple, count] : other.tuple_marginal) tuple_marginal[tuple] += count;
  total += other.total;
  for (const auto& [tuple, count] : other.texts_per_tuple) texts_per_tuple[tuple] += count;
  for (const auto& [tuple, count] : other.tokens_per_tuple) tokens_per_tuple[tuple] += count;
  for (const auto& [tuple, tokens] : other.token_freq) {
    auto& mine = token_freq[tuple];
    for (const auto& [token, count] : tokens) mine[token] += count;
  }
  // Duplicates = sum over texts of (occurrences - 1); every text present on
  // both sides adds exactly one more duplicate.
  for (const auto& [tuple, dups] : other.duplicates_per_tuple) duplicates_per_tuple[tuple] += dups;
  for (const auto& [tuple, texts] : other.text_occurrences) {
    auto& mine = text_occurrences[tuple];
    auto& dups = duplicates_per_tuple[tuple];
    for (const auto& [text, count] : texts) {
      auto& existing = mine[text];
      if (existing > 0) ++dups;
      existing += count;
    }
  }
}

CountsTable build_counts(const std::vector<UnitBag>& bags, const std::vector<std::string>& tuples,
                         const std::vector<std::string>& texts,
                         const std::vector<TokenList>& tokens) {
  if (bags.size() != tuples.size() || bags.size() != texts.size() ||
      (!tokens.empty() && tokens.size() != bags.size())) {
    throw Error(ErrorKind::ConfigError, "build_counts: per-row inputs differ in length");
  }
  CountsTable table;
  static const TokenList kNoTokens;
  for (std::size_t r = 0; r < bags.size(); ++r) {
    table.add_row(tuples[r], bags[r], tokens.empty() ? kNoTokens : tokens[r], texts[r]);
  }
  return table;
}

}  // namespace lexivar
