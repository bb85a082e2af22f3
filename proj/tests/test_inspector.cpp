#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <random>

#include "lexivar/inspector.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace lexivar;
using support::kind_of;

namespace {

InspectionConfig config_for(const std::string& tsv, std::vector<std::string> vars,
                            std::vector<std::string> metrics) {
  InspectionConfig config;
  config.source = DatasetSource::from_string(tsv, TableFormat::tsv);
  config.texts = {"text"};
  for (const auto& v : vars) config.variables.push_back(parse_variable_decl(v));
  config.metrics = std::move(metrics);
  return config;
}

}  // namespace

TEST_CASE("results do not depend on the shard count") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto corpus = oracle::random_corpus(rng, 60);
    const auto config = config_for(oracle::to_tsv(corpus), {"label:nominal:general"},
                                   {"pmi", "npw_pmi", "relevance", "maas", "stats"});
    const auto one = serialize(run_inspection(config, {1, true}));
    CHECK(serialize(run_inspection(config, {2, true})) == one);
    CHECK(serialize(run_inspection(config, {8, true})) == one);
    CHECK(serialize(run_inspection(config, {64, true})) == one);
  }
}

TEST_CASE("scores match the oracle end to end") {
  std::mt19937_64 rng(4);
  const auto corpus = oracle::random_corpus(rng, 40);
  const auto doc = run_inspection(config_for(oracle::to_tsv(corpus), {"label:nominal:general"}, {"pmi"}), {3});
  const auto expected = oracle::pmi(oracle::unigram_occurrences(corpus), false, false, false);
  const auto actual = doc.scores("pmi");
  REQUIRE(actual.size() == expected.size());
  for (const auto& [tuple, units] : expected) {
    for (const auto& [unit, score] : units) {
      CHECK(actual.at(tuple).at(unit) == doctest::Approx(score).epsilon(1e-8));
    }
  }
}

TEST_CASE("errors carry the stage name") {
  auto config = config_for("text\tx\na\tfoo\n", {"x:quantitative:general"}, {"pmi"});
  try {
    run_inspection(config);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonNumericValue);
    CHECK(std::string(e.what()).rfind("variables:", 0) == 0);
  }
  CHECK(kind_of([] { run_inspection(config_for("text\tlabel\na\tA\n", {"label:nominal:general"}, {"relevance"})); }) ==
        ErrorKind::SingleClass);
  CHECK(kind_of([] { run_inspection(config_for("text\na\n", {}, {})); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { run_inspection(config_for("text\na\n", {}, {"nope"})); }) == ErrorKind::ConfigError);
}

TEST_CASE("zero-variable inspection uses the empty tuple") {
  const auto doc = run_inspection(config_for("text\na b\nb c\n", {}, {"ttr", "stats"}), {1, true});
  CHECK(doc.metrics.at("ttr").contains(""));
  CHECK(deserialize(serialize(doc)) == doc);
}

TEST_CASE("two text columns compare sources") {
  InspectionConfig config;
  config.source = DatasetSource::from_string(
      "question\thuman_answers\tchatgpt_answers\nq\tyes indeed\tcertainly yes\nr\tno\tcertainly not\n",
      TableFormat::tsv);
  config.texts = {"human_answers", "chatgpt_answers"};
  config.metrics = {"pmi", "stats"};
  const auto doc = run_inspection(config, {2, true});
  CHECK(doc.metadata.variables.size() == 1);
  CHECK(doc.metadata.variables[0].decl.name == kTextSourceVariable);
  CHECK(doc.metrics.at("pmi").contains("human_answers"));
  CHECK(doc.metrics.at("pmi").at("chatgpt_answers").contains("certainly"));
  CHECK(doc.metadata.row_count == 4);
}

TEST_CASE("thread count resolution") {
  CHECK(resolve_thread_count(3) == 3);
  ::setenv("LEXIVAR_THREADS", "5", 1);
  CHECK(resolve_thread_count(0) == 5);
  ::setenv("LEXIVAR_THREADS", "junk", 1);
  CHECK(resolve_thread_count(0) >= 1);
  ::unsetenv("LEXIVAR_THREADS");
}

TEST_CASE("stopwords and lowercasing flow through") {
  auto config = config_for("text\tlabel\nThe user said\tA\nthe URL\tB\n", {"label:nominal:general"}, {"pmi"});
  config.preprocess = {true, {}, {"the", "user", "url"}};
  const auto doc = run_inspection(config, {1, true});
  CHECK(doc.metadata.vocab_size == 1);
  CHECK(doc.metrics.at("pmi").at("A").contains("said"));
}
