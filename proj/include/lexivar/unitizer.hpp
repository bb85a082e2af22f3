#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lexivar {

using TokenList = std::vector<std::string>;

enum class TokenizerKind { default_whitespace, custom };

struct TokenizerSpec {
  TokenizerKind kind = TokenizerKind::default_whitespace;
  std::optional<std::string> custom_id;

  static TokenizerSpec whitespace() { return {}; }
  static TokenizerSpec custom(std::string id) { return {TokenizerKind::custom, std::move(id)}; }
  bool operator==(const TokenizerSpec&) const = default;
};

using TokenizerFn = std::function<TokenList(std::string_view)>;

/// Process-wide table of named tokenizers. Registration is expected at start
/// up; lookups are thread-safe.
class TokenizerRegistry {
public:
  static TokenizerRegistry& instance();

  void add(std::string id, TokenizerFn fn);
  bool contains(std::string_view id) const;
  std::vector<std::string> ids() const;
  /// Returns a copy of the registered function; throws UnknownTokenizer.
  TokenizerFn get(std::string_view id) const;

private:
  TokenizerRegistry();
  std::map<std::string, TokenizerFn, std::less<>> fns_;
};

/// Splits on maximal runs of Unicode White_Space.
TokenList whitespace_tokenize(std::string_view text);

/// Custom tokenizer output is validated: tokens must be non-empty and free of
/// spaces, since a single space joins tokens into unit keys.
TokenList tokenize(std::string_view text, const TokenizerSpec& spec);

struct PreprocessOptions {
  bool lowercase = false;
  std::vector<std::string> stopword_files;
  std::vector<std::string> extra_stopwords;

  bool operator==(const PreprocessOptions&) const = default;
};

/// Reads a newline-delimited stopword file: lines trimmed, blank lines and
/// `#` comments skipped.
std::vector<std::string> read_stopword_file(const std::string& path);

/// Merged stopword set ready for matching. Entries are lowercased when the
/// options ask for lowercasing, so matching happens after case mapping.
class Preprocessor {
public:
  explicit Preprocessor(const PreprocessOptions& opts);

  TokenList apply(TokenList tokens) const;
  const std::set<std::string, std::less<>>& stopwords() const { return stopwords_; }

private:
  bool lowercase_;
  std::set<std::string, std::less<>> stopwords_;
};

TokenList preprocess(TokenList tokens, const PreprocessOptions& opts);

enum class UnitMode { ngram, cooccurrence };

struct UnitConfig {
  UnitMode mode = UnitMode::ngram;
  std::size_t n = 1;
  std::optional<std::size_t> window;  // cooccurrence only
  bool dedup_same_surface = false;

  static UnitConfig ngrams(std::size_t n) { return {UnitMode::ngram, n, std::nullopt, false}; }
  static UnitConfig cooccurrences(std::size_t n, std::size_t window, bool dedup) {
    return {UnitMode::cooccurrence, n, window, dedup};
  }
  void validate() const;
  bool operator==(const UnitConfig&) const = default;
};

/// Multiset of unit keys for one text.
struct UnitBag {
  std::map<std::string, std::size_t> units;
  std::size_t token_count = 0;

  std::size_t size() const;
  bool operator==(const UnitBag&) const = default;
};

UnitBag build_ngrams(const TokenList& tokens, std::size_t n);
UnitBag build_cooccurrences(const TokenList& tokens, const UnitConfig& cfg);

/// Dispatches on `cfg.mode`.
UnitBag build_units(const TokenList& tokens, const UnitConfig& cfg);

}  // namespace lexivar
