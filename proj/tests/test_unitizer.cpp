#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <unicode/uchar.h>

#include "lexivar/unicode.hpp"
#include "lexivar/unitizer.hpp"
#include "support.hpp"

using namespace lexivar;
using support::kind_of;

using Bag = std::map<std::string, std::size_t>;

TEST_CASE("White_Space table matches ICU for every code point") {
  for (char32_t cp = 0; cp <= 0x10FFFF; ++cp) {
    if (cp >= 0xD800 && cp <= 0xDFFF) continue;
    const bool expected = u_hasBinaryProperty(static_cast<UChar32>(cp), UCHAR_WHITE_SPACE);
    if (unicode::is_white_space(cp) != expected) {
      FAIL_CHECK("mismatch at U+" << std::hex << static_cast<std::uint32_t>(cp));
    }
  }
}

TEST_CASE("utf8 validation") {
  CHECK(unicode::is_valid_utf8("ciao γειά 你好"));
  CHECK(unicode::find_invalid_utf8("ab\xC3") == 2u);
  CHECK_FALSE(unicode::is_valid_utf8("\xED\xA0\x80"));  // surrogate
  CHECK_FALSE(unicode::is_valid_utf8("\xC0\xAF"));      // overlong
}

TEST_CASE("whitespace tokenizer") {
  CHECK(whitespace_tokenize("ciao  mondo") == TokenList{"ciao", "mondo"});
  CHECK(whitespace_tokenize("γειά σου κόσμε") == TokenList{"γειά", "σου", "κόσμε"});
  CHECK(whitespace_tokenize("").empty());
  CHECK(whitespace_tokenize(" \t　 ").empty());
  CHECK(whitespace_tokenize("日本　語") == TokenList{"日本", "語"});
}

TEST_CASE("tokenize, join, tokenize is a fixpoint") {
  std::mt19937 rng(11);
  const std::vector<std::string> pieces = {"a", "é", " ", " ", "\t", " ", "b", "日"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    for (std::size_t i = rng() % 12; i > 0; --i) text += pieces[rng() % pieces.size()];
    const auto tokens = whitespace_tokenize(text);
    std::string joined;
    for (const auto& t : tokens) joined += (joined.empty() ? "" : " ") + t;
    CHECK(whitespace_tokenize(joined) == tokens);
  }
}

TEST_CASE("custom tokenizers") {
  CHECK(TokenizerRegistry::instance().contains("char"));
  CHECK(tokenize("añb", TokenizerSpec::custom("char")) == TokenList{"a", "ñ", "b"});
  CHECK(kind_of([] { tokenize("x", TokenizerSpec::custom("missing")); }) == ErrorKind::UnknownTokenizer);
  TokenizerRegistry::instance().add("bad_space", [](std::string_view) { return TokenList{"a b"}; });
  TokenizerRegistry::instance().add("bad_empty", [](std::string_view) { return TokenList{""}; });
  CHECK(kind_of([] { tokenize("x", TokenizerSpec::custom("bad_space")); }) == ErrorKind::InvalidToken);
  CHECK(kind_of([] { tokenize("x", TokenizerSpec::custom("bad_empty")); }) == ErrorKind::InvalidToken);
  CHECK(kind_of([] { tokenize("\xff", TokenizerSpec::whitespace()); }) == ErrorKind::EncodingError);
}

TEST_CASE("preprocessing") {
  PreprocessOptions lower{true, {}, {"the"}};
  CHECK(preprocess({"The", "CAT"}, lower) == TokenList{"cat"});
  PreprocessOptions extra{false, {}, {"user", "url"}};
  CHECK(preprocess({"user", "url", "ghe"}, extra) == TokenList{"ghe"});
  CHECK(preprocess({"Straße"}, {true, {}, {}}) == TokenList{"straße"});
  CHECK(preprocess({"ΣΟΦΙΑ", "İstanbul"}, {true, {}, {}})[0] == "σοφια");
  // Stopwords are matched after lowercasing, even when listed in upper case.
  CHECK(preprocess({"The"}, {true, {}, {"THE"}}).empty());
}

TEST_CASE("preprocess is idempotent") {
  std::mt19937 rng(5);
  const std::vector<std::string> words = {"The", "the", "CAT", "Straße", "ÉTÉ", "a", "user"};
  const PreprocessOptions opts{true, {}, {"a", "user"}};
  for (int trial = 0; trial < 200; ++trial) {
    TokenList tokens;
    for (std::size_t i = rng() % 8; i > 0; --i) tokens.push_back(words[rng() % words.size()]);
    const auto once = preprocess(tokens, opts);
    CHECK(preprocess(once, opts) == once);
  }
}

TEST_CASE("stopword files") {
  const auto dir = support::scratch_dir("stopwords");
  support::write_file(dir / "it.txt", "# italian\n  il \n\nla\n");
  CHECK(read_stopword_file((dir / "it.txt").string()) == std::vector<std::string>{"il", "la"});
  PreprocessOptions opts{false, {(dir / "it.txt").string()}, {"di"}};
  CHECK(preprocess({"il", "gatto", "di", "la"}, opts) == TokenList{"gatto"});
  CHECK(kind_of([] { read_stopword_file("/nonexistent/stop.txt"); }) == ErrorKind::StopwordFileNotFound);
}

TEST_CASE("n-grams") {
  CHECK(build_ngrams({"a", "b", "a"}, 1).units == Bag{{"a", 2}, {"b", 1}});
  CHECK(build_ngrams({"a", "b", "a"}, 2).units == Bag{{"a b", 1}, {"b a", 1}});
  const auto short_bag = build_ngrams({"a", "b"}, 3);
  CHECK(short_bag.units.empty());
  CHECK(short_bag.token_count == 2);
}

TEST_CASE("n-gram count property") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    TokenList tokens;
    for (std::size_t i = rng() % 10; i > 0; --i) tokens.push_back(std::string(1, static_cast<char>('a' + rng() % 3)));
    const std::size_t n = 1 + rng() % 4;
    const auto bag = build_ngrams(tokens, n);
    const std::size_t expected = tokens.size() >= n ? tokens.size() - n + 1 : 0;
    CHECK(bag.size() == expected);
    CHECK(bag.token_count == tokens.size());
  }
}

TEST_CASE("co-occurrences") {
  CHECK(build_cooccurrences({"a", "b", "c", "a"}, UnitConfig::cooccurrences(2, 3, true)).units ==
        Bag{{"a b", 2}, {"a c", 2}, {"b c", 1}});
  CHECK(build_cooccurrences({"a", "a"}, UnitConfig::cooccurrences(2, 2, true)).units.empty());
  CHECK(build_cooccurrences({"a", "a"}, UnitConfig::cooccurrences(2, 2, false)).units == Bag{{"a a", 1}});
  CHECK(kind_of([] { UnitConfig::cooccurrences(3, 2, false).validate(); }) == ErrorKind::WindowTooSmall);
}

TEST_CASE("co-occurrences against position enumeration") {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    TokenList tokens;
    for (std::size_t i = rng() % 9; i > 0; --i) tokens.push_back(std::string(1, static_cast<char>('a' + rng() % 4)));
    const std::size_t window = 2 + rng() % 4;
    const bool dedup = rng() % 2;
    Bag expected;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      for (std::size_t j = i + 1; j < tokens.size() && j - i <= window - 1; ++j) {
        if (dedup && tokens[i] == tokens[j]) continue;
        auto lo = std::min(tokens[i], tokens[j]);
        auto hi = std::max(tokens[i], tokens[j]);
        ++expected[lo + " " + hi];
      }
    }
    CHECK(build_cooccurrences(tokens, UnitConfig::cooccurrences(2, window, dedup)).units == expected);
  }
}

TEST_CASE("window = n over distinct tokens degenerates to sorted n-grams") {
  const TokenList tokens = {"d", "a", "c", "b", "e"};
  for (std::size_t n = 1; n <= 4; ++n) {
    Bag expected;
    for (const auto& [key, count] : build_ngrams(tokens, n).units) {
      auto parts = whitespace_tokenize(key);
      std::sort(parts.begin(), parts.end());
      std::string sorted;
      for (const auto& p : parts) sorted += (sorted.empty() ? "" : " ") + p;
      expected[sorted] += count;
    }
    CHECK(build_cooccurrences(tokens, UnitConfig::cooccurrences(n, n, false)).units == expected);
  }
}
