#include "lexivar/unitizer.hpp"

#include <filesystem>
#include <fstream>
#include <mutex>
#include <shared_mutex>

#include "lexivar/error.hpp"
#include "lexivar/unicode.hpp"

namespace lexivar {

namespace {

std::shared_mutex& registry_mutex() {
  static std::shared_mutex m;
  return m;
}

TokenList character_tokenize(std::string_view text) {
  TokenList out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const char32_t cp = unicode::decode_next(text, pos);
    if (!unicode::is_white_space(cp)) out.emplace_back(text.substr(start, pos - start));
  }
  return out;
}

}  // namespace

TokenizerRegistry::TokenizerRegistry() {
  fns_.emplace("char", character_tokenize);
}

TokenizerRegistry& TokenizerRegistry::instance() {
  static TokenizerRegistry registry;
  return registry;
}

void TokenizerRegistry::add(std::string id, TokenizerFn fn) {
  std::unique_lock lock(registry_mutex());
  fns_.insert_or_assign(std::move(id), std::move(fn));
}

bool TokenizerRegistry::contains(std::string_view id) const {
  std::shared_lock lock(registry_mutex());
  return fns_.find(id) != fns_.end();
}

std::vector<std::string> TokenizerRegistry::ids() const {
  std::shared_lock lock(registry_mutex());
  std::vector<std::string> out;
  for (const auto& [id, fn] : fns_) out.push_back(id);
  return out;
}

TokenizerFn TokenizerRegistry::get(std::string_view id) const {
  std::shared_lock lock(registry_mutex());
  auto it = fns_.find(id);
  if (it == fns_.end()) {
    throw Error(ErrorKind::UnknownTokenizer, "no tokenizer registered as '" + std::string(id) + "'");
  }
  return it->second;
}

TokenList whitespace_tokenize(std::string_view text) {
  TokenList out;
  std::size_t pos = 0;
  std::size_t token_start = std::string_view::npos;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const char32_t cp = unicode::decode_next(text, pos);
    if (unicode::is_white_space(cp)) {
      if (token_start != std::string_view::npos) {
        out.emplace_back(text.substr(token_start, start - token_start));
        token_start = std::string_view::npos;
      }
    } else if (token_start == std::string_view::npos) {
      token_start = start;
    }
  }
  if (token_start != std::string_view::npos) out.emplace_back(text.substr(token_start));
  return out;
}

TokenList tokenize(std::string_view text, const TokenizerSpec& spec) {
  if (auto bad = unicode::find_invalid_utf8(text)) {
    throw Error(ErrorKind::EncodingError, "invalid UTF-8 at byte " + std::to_string(*bad + 1));
  }
  if (spec.kind == TokenizerKind::default_whitespace) return whitespace_tokenize(text);

  if (!spec.custom_id) throw Error(ErrorKind::UnknownTokenizer, "custom tokenizer without an id");
  auto fn = TokenizerRegistry::instance().get(*spec.custom_id);
  TokenList tokens = fn(text);
  for (const auto& token : tokens) {
    if (token.empty() || token.find(' ') != std::string::npos) {
      throw Error(ErrorKind::InvalidToken, "tokenizer '" + *spec.custom_id +
                                               "' produced an empty or space-containing token '" +
                                               token + "'");
    }
  }
  return tokens;
}

std::vector<std::string> read_stopword_file(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(ErrorKind::StopwordFileNotFound, "stopword file not found: " + path);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::StopwordFileNotFound, "cannot open stopword file: " + path);

  std::vector<std::string> words;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto bad = unicode::find_invalid_utf8(line)) {
      throw Error(ErrorKind::EncodingError,
                  path + ":" + std::to_string(number) + ": invalid UTF-8");
    }
    const auto first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r\n");
    std::string word = line.substr(first, last - first + 1);
    if (word.front() == '#') continue;
    words.push_back(std::move(word));
  }
  return words;
}

Preprocessor::Preprocessor(const PreprocessOptions& opts) : lowercase_(opts.lowercase) {
  auto add = [&](const std::string& word) {
    stopwords_.insert(lowercase_ ? unicode::to_lower(word) : word);
  };
  for (const auto& path : opts.stopword_files) {
    for (const auto& word : read_stopword_file(path)) add(word);
  }
  for (const auto& word : opts.extra_stopwords) add(word);
}

TokenList Preprocessor::apply(TokenList tokens) const {
  TokenList out;
  out.reserve(tokens.size());
  for (auto& token : tokens) {
    if (lowercase_) token = unicode::to_lower(token);
    if (stopwords_.find(token) != stopwords_.end()) continue;
    out.push_back(std::move(token));
  }
  return out;
}

TokenList preprocess(TokenList tokens, const PreprocessOptions& opts) {
  return Preprocessor(opts).apply(std::move(tokens));
}

void UnitConfig::validate() const {
  if (n == 0) throw Error(ErrorKind::ConfigError, "unit size n must be at least 1");
  if (mode == UnitMode::ngram) {
    if (window) throw Error(ErrorKind::ConfigError, "window is only valid for co-occurrence units");
    return;
  }
  if (!window) throw Error(ErrorKind::ConfigError, "co-occurrence units require a window");
  if (*window < n) {
    throw Error(ErrorKind::WindowTooSmall, "window " + std::to_string(*window) +
                                               " is smaller than n=" + std::to_string(n));
  }
}

std::size_t UnitBag::size() const {
  std::size_t total = 0;
  for (const auto& [unit, count] : units) total += count;
  return total;
}

UnitBag build_ngrams(const TokenList& tokens, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::ConfigError, "n-gram size must be at least 1");
  UnitBag bag;
  bag.token_count = tokens.size();
  if (tokens.size() < n) return bag;
  std::string key;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key.push_back(' ');
      key += tokens[i + k];
    }
    ++bag.units[key];
  }
  return bag;
}

namespace {

void emit_combinations(const TokenList& tokens, std::size_t n, std::size_t last_allowed,
                       std::vector<std::size_t>& chosen, bool dedup, UnitBag& bag) {
  if (chosen.size() == n) {
    std::vector<std::string_view> surfaces;
    surfaces.reserve(n);
    for (auto pos : chosen) surfaces.emplace_back(tokens[pos]);
    std::sort(surfaces.begin(), surfaces.end());
    if (dedup && std::adjacent_find(surfaces.begin(), surfaces.end()) != surfaces.end()) return;
    std::string key(surfaces.front());
    for (std::size_t k = 1; k < surfaces.size(); ++k) {
      key.push_back(' ');
      key.append(surfaces[k]);
    }
    ++bag.units[key];
    return;
  }
  for (std::size_t pos = chosen.back() + 1; pos <= last_allowed; ++pos) {
    chosen.push_back(pos);
    emit_combinations(tokens, n, last_allowed, chosen, dedup, bag);
    chosen.pop_back();
  }
}

}  // namespace

UnitBag build_cooccurrences(const TokenList& tokens, const UnitConfig& cfg) {
  if (cfg.mode != UnitMode::cooccurrence) {
    throw Error(ErrorKind::ConfigError, "build_cooccurrences requires co-occurrence mode");
  }
  cfg.validate();
  const std::size_t window = *cfg.window;
  UnitBag bag;
  bag.token_count = tokens.size();
  std::vector<std::size_t> chosen;
  chosen.reserve(cfg.n);
  for (std::size_t first = 0; first < tokens.size(); ++first) {
    // Span rule: last position - first position <= window - 1.
    const std::size_t last_allowed = std::min(tokens.size() - 1, first + window - 1);
    chosen.assign(1, first);
    emit_combinations(tokens, cfg.n, last_allowed, chosen, cfg.dedup_same_surface, bag);
  }
  return bag;
}

UnitBag build_units(const TokenList& tokens, const UnitConfig& cfg) {
  return cfg.mode == UnitMode::ngram ? build_ngrams(tokens, cfg.n)
                                     : build_cooccurrences(tokens, cfg);
}

}  // namespace lexivar
