#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "lexivar/charts.hpp"
#include "lexivar/cli.hpp"
#include "lexivar/inspector.hpp"
#include "support.hpp"

using namespace lexivar;
namespace fs = std::filesystem;

namespace {

const fs::path kData = LEXIVAR_TEST_DATA;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("inspect the dialect corpus with stopwords") {
  const auto dir = support::scratch_dir("cli_dialect");
  const auto results = (dir / "results.json").string();
  auto r = cli({"inspect", "--data", (kData / "dialect.tsv").string(), "--text-col", "text", "--var",
                "region:nominal:spatial", "--metric", "npw_pmi", "--lowercase", "--stopwords",
                (kData / "it_stopwords.txt").string(), "--extra-stopword", "user", "--extra-stopword", "url",
                "-o", results});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("rows=48 tuples=4 vocab=", 0) == 0);
  CHECK(line_count(r.out) == 1);
  const auto doc = read_results_file(results);
  for (const auto& [tuple, units] : doc.metrics.at("npw_pmi")) {
    CHECK_FALSE(units.contains("user"));
    CHECK_FALSE(units.contains("il"));
    CHECK_FALSE(units.contains("Roma"));
  }
}

TEST_CASE("binned coordinates from the command line") {
  const auto dir = support::scratch_dir("cli_binned");
  const auto results = (dir / "r.json").string();
  auto r = cli({"inspect", "--data", (kData / "dialect.tsv").string(), "--text-col", "text", "--var",
                "lat:coordinate:spatial:bins=30", "--var", "lon:coordinate:spatial:bins=30", "--metric", "pmi",
                "-o", results});
  REQUIRE(r.code == 0);
  const auto doc = read_results_file(results);
  for (const auto& [tuple, units] : doc.metrics.at("pmi")) {
    const auto values = deserialize_tuple(tuple, 2);
    CHECK(parse_bin_label(values[0]).has_value());
    CHECK(parse_bin_label(values[1]).has_value());
  }
}

TEST_CASE("user errors exit with 1 and one diagnostic line") {
  auto r = cli({"inspect", "--text-col", "text", "--metric", "pmi"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--data") != std::string::npos);
  CHECK(line_count(r.err) == 1);
  CHECK(r.out.empty());

  r = cli({"inspect", "--data", "/nonexistent.tsv", "--text-col", "text", "--metric", "pmi"});
  CHECK(r.code == 1);
  CHECK(r.err.find("FileNotFound") != std::string::npos);

  r = cli({"inspect", "--data", (kData / "dialect.tsv").string(), "--text-col", "text", "--metric", "bogus"});
  CHECK(r.code == 1);

  r = cli({"inspect", "--data", (kData / "dialect.tsv").string(), "--text-col", "text", "--var", "region:wat:spatial",
           "--metric", "pmi"});
  CHECK(r.code == 1);

  r = cli({"frobnicate"});
  CHECK(r.code == 1);
  r = cli({"inspect", "--no-such-flag"});
  CHECK(r.code == 1);
  r = cli({"visualize", "--results", "/nonexistent.json"});
  CHECK(r.code == 1);
}

TEST_CASE("visualize flags") {
  const auto dir = support::scratch_dir("cli_visualize");
  const auto results = (dir / "r.json").string();
  REQUIRE(cli({"inspect", "--data", (kData / "dialect.tsv").string(), "--text-col", "text", "--var",
               "region:nominal:spatial", "--metric", "npw_pmi", "--lowercase", "-o", results})
              .code == 0);

  auto r = cli({"visualize", "--results", results, "--output-dir", (dir / "charts").string(), "--format",
                "html,json", "--top-k", "20"});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "charts" / "npw_pmi__bar.html"));
  CHECK(fs::exists(dir / "charts" / "npw_pmi__bar.json"));

  r = cli({"visualize", "--results", results, "--output-dir", (dir / "filtered").string(), "--format", "json",
           "--filter-regex", "ghe", "--geometry", (kData / "regions.geojson").string()});
  CHECK(r.code == 0);
  CHECK(r.err.find("GeometryMismatch") != std::string::npos);
  const auto spec = nlohmann::json::parse(support::read_file(dir / "filtered" / "npw_pmi__choropleth.json"));
  for (const auto& v : spec["layer"][1]["data"]["values"]) {
    CHECK(v["unit"].get<std::string>().find("ghe") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(dir / "filtered" / "npw_pmi__bar.html"));

  r = cli({"visualize", "--results", results, "--top-k", "5", "--filter-unit", "ghe"});
  CHECK(r.code == 1);
  CHECK(r.err.find("mutually exclusive") != std::string::npos);

  r = cli({"visualize", "--results", results, "--filter-regex", "(?=x)"});
  CHECK(r.code == 1);
  CHECK(r.err.find("InvalidPattern") != std::string::npos);

  r = cli({"visualize", "--results", results, "--format", "pdf"});
  CHECK(r.code == 1);
}

TEST_CASE("command line and library produce the same charts") {
  const auto dir = support::scratch_dir("cli_golden");
  support::write_file(dir / "toy.tsv", "text\tlabel\na b a\tA\nb c\tB\n");
  const auto results = (dir / "results.json").string();
  REQUIRE(cli({"inspect", "--data", (dir / "toy.tsv").string(), "--text-col", "text", "--var",
               "label:nominal:general", "--metric", "pmi", "--metric", "stats", "--timestamp-zero", "-o", results})
              .code == 0);
  REQUIRE(cli({"visualize", "--results", results, "--output-dir", (dir / "cli").string(), "--top-k", "2"}).code == 0);

  InspectionConfig config;
  config.source = DatasetSource::from_file(dir / "toy.tsv");
  config.texts = {"text"};
  config.variables = {parse_variable_decl("label:nominal:general")};
  config.metrics = {"pmi", "stats"};
  const auto doc = run_inspection(config, {0, true});
  CHECK(support::read_file(results) == serialize(doc));

  VisualizerArgs args;
  args.output_dir = (dir / "lib").string();
  args.top_k = 2;
  const auto result = visualize(doc, args);
  REQUIRE(result.files.size() == 4);
  for (const auto& file : result.files) {
    const auto name = fs::path(file).filename();
    CHECK(support::read_file(file) == support::read_file(dir / "cli" / name));
  }
}

TEST_CASE("config file runs with flag overrides") {
  const auto dir = support::scratch_dir("cli_config");
  support::write_file(dir / "toy.tsv", "text\tlabel\na b a\tA\nb c\tB\n");
  const nlohmann::json config = {
      {"source", {{"location", (dir / "toy.tsv").string()}}},
      {"texts", {"text"}},
      {"variables", {{{"name", "label"}, {"type", "nominal"}, {"semantics", "general"}}}},
      {"unit", {{"mode", "cooccurrence"}, {"n", 2}, {"window", 3}}},
      {"metrics", {"pmi"}}};
  support::write_file(dir / "config.json", config.dump());
  const auto results = (dir / "r.json").string();
  auto r = cli({"inspect", "--config", (dir / "config.json").string(), "--metric", "ttr", "-o", results});
  REQUIRE(r.code == 0);
  const auto doc = read_results_file(results);
  CHECK(doc.metadata.metrics == std::vector<std::string>{"ttr"});
  CHECK(doc.metadata.config.unit == UnitConfig::cooccurrences(2, 3, false));

  support::write_file(dir / "broken.json", "{");
  CHECK(cli({"inspect", "--config", (dir / "broken.json").string()}).code == 1);
}

TEST_CASE("help and version succeed") {
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"inspect", "--help"}).code == 0);
  CHECK(cli({"--version"}).out.find(std::string(kToolVersion)) != std::string::npos);
}
