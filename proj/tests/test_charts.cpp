#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "lexivar/charts.hpp"
#include "lexivar/inspector.hpp"
#include "planner_matrix.hpp"
#include "support.hpp"

using namespace lexivar;
using nlohmann::json;
using support::kind_of;

namespace {

VariableDecl decl(const std::string& text) { return parse_variable_decl(text); }

const std::string kTable =
    "text\tregion\tyear\tscore\tgroup\tlat\tlon\n"
    "ghe bella ghe\tVeneto\t2019\t1.5\tx\t45.4\t12.3\n"
    "daje roma\tLazio\t2020\t2.5\ty\t41.9\t12.5\n"
    "ghe xe\tVeneto\t2021\t3.5\tx\t45.7\t11.9\n"
    "bella roma\tLazio\t2019\t4.5\ty\t41.8\t12.4\n"
    "ciao bella\tSicilia\t2020\t0.5\tz\t37.5\t14.0\n";

ResultsDocument inspect(std::vector<std::string> vars, std::vector<std::string> metrics = {"pmi"}) {
  InspectionConfig config;
  config.source = DatasetSource::from_string(kTable, TableFormat::tsv);
  config.texts = {"text"};
  for (const auto& v : vars) config.variables.push_back(decl(v));
  config.metrics = std::move(metrics);
  return run_inspection(config, {1, true});
}

const char* kRegions = R"({"type":"FeatureCollection","features":[
  {"type":"Feature","properties":{"name":"veneto"},"geometry":{"type":"Polygon","coordinates":[[[11,45],[13,45],[13,46],[11,46],[11,45]]]}},
  {"type":"Feature","properties":{"name":"Lazio"},"geometry":{"type":"Polygon","coordinates":[[[12,41],[13,41],[13,42],[12,42],[12,41]]]}}
]})";

ChartDocument render_one(const ResultsDocument& doc, const VisualizerArgs& args, ChartType type,
                         Warnings* warnings = nullptr) {
  const auto decls = doc.declarations();
  Warnings local;
  for (const auto& plan : plan_charts(doc.metadata.metrics.front(), decls, args.geometry.has_value())) {
    if (plan.chart_type != type) continue;
    auto chart = render_chart(plan, doc, args, warnings ? *warnings : local);
    REQUIRE(chart.has_value());
    return *chart;
  }
  FAIL("no plan of the requested type");
  return {};
}

std::set<std::string> units_in(const json& values) {
  std::set<std::string> units;
  for (const auto& v : values) units.insert(v["unit"].get<std::string>());
  return units;
}

}  // namespace

TEST_CASE("planner examples") {
  auto plans = plan_charts("npw_pmi", {decl("region:nominal:spatial")});
  REQUIRE(plans.size() == 1);
  CHECK(plans[0].chart_type == ChartType::bar);
  CHECK(plans[0].channels_of("region") == std::vector<Channel>{Channel::x});
  CHECK(plans[0].unit_widget == UnitWidget::regex_search);

  plans = plan_charts("npw_pmi", {decl("region:nominal:spatial")}, true);
  REQUIRE(plans.size() == 2);
  CHECK(plans[1].chart_type == ChartType::choropleth);

  plans = plan_charts("pmi", {decl("lat:coordinate:spatial:bins=30"), decl("lon:coordinate:spatial:bins=30")});
  CHECK(plans[0].chart_type == ChartType::binned_map);
  plans = plan_charts("pmi", {decl("lat:coordinate:spatial"), decl("lon:coordinate:spatial")});
  CHECK(plans[0].chart_type == ChartType::geo_scatter);

  plans = plan_charts("relevance", {decl("hatespeech:ordinal:general"), decl("annotator_race:nominal:general")});
  CHECK(plans[0].chart_type == ChartType::heatmap);
  CHECK(plans[0].unit_widget == UnitWidget::dropdown);
  CHECK(plans[0].dimensions() == 4);

  plans = plan_charts("pmi", {decl("year:nominal:temporal")});
  CHECK(plans[0].chart_type == ChartType::line);
  plans = plan_charts("pmi", {decl("year:quantitative:temporal"), decl("group:nominal:general")});
  CHECK(plans[0].chart_type == ChartType::line);
  CHECK(plans[0].channels_of("group") == std::vector<Channel>{Channel::color});
  plans = plan_charts("pmi", {decl("score:quantitative:general")});
  CHECK(plans[0].chart_type == ChartType::scatter);
  plans = plan_charts("pmi", {});
  CHECK(plans[0].chart_type == ChartType::bar);

  plans = plan_charts("pmi", {decl("a:nominal:general"), decl("b:nominal:general"), decl("c:ordinal:general")});
  CHECK(plans[0].channels_of("c") == std::vector<Channel>{Channel::dropdown});
  CHECK(plans[0].dimensions() == 5);
}

TEST_CASE("unsupported combinations carry a remedy") {
  auto rejects = [](std::vector<VariableDecl> decls) {
    return kind_of([&] { plan_charts("pmi", decls); }) == ErrorKind::UnsupportedCombination;
  };
  CHECK(rejects({decl("a:nominal:general"), decl("b:nominal:general"), decl("c:nominal:general"),
                 decl("d:nominal:general")}));
  CHECK(rejects({decl("lat:coordinate:spatial")}));
  CHECK(rejects({decl("lat:coordinate:spatial:bins=3"), decl("lon:coordinate:spatial")}));
  CHECK(rejects({decl("lat:coordinate:spatial"), decl("lon:coordinate:spatial"), decl("r:nominal:spatial")}));
  CHECK(rejects({decl("x:quantitative:general"), decl("y:quantitative:general")}));
  try {
    plan_charts("pmi", {decl("x:quantitative:general"), decl("y:nominal:general"), decl("z:nominal:general")});
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("bins=K") != std::string::npos);
  }
  CHECK(kind_of([] { plan_charts("bogus", {}); }) == ErrorKind::ConfigError);
}

TEST_CASE("signature matrix coverage") {
  const auto outcomes = matrix::enumerate();
  std::size_t accepted = 0;
  for (const auto& o : outcomes) {
    INFO(o.signature);
    CHECK_FALSE(o.other_failure);
    if (o.plans.empty()) {
      CHECK(o.rejected_cleanly);
      continue;
    }
    ++accepted;
    for (const auto& plan : o.plans) CHECK(matrix::within_budget(plan));
  }
  CHECK(accepted >= 30);
  MESSAGE("accepted signatures: " << accepted << " of " << outcomes.size());
}

TEST_CASE("planning is deterministic") {
  const std::vector<VariableDecl> decls{decl("a:nominal:general"), decl("b:ordinal:temporal")};
  CHECK(plan_charts("pmi", decls) == plan_charts("pmi", decls));
}

TEST_CASE("regex subset") {
  ScoreTable t{{"A", {{"ghe", 1.0}, {"gh", 2.0}, {"xe", 0.1}}}, {"B", {{"roma", 1.0}}}};
  const auto f = filter_units(t, "ghe");
  CHECK(f.size() == 1);
  CHECK(f.at("A").size() == 1);
  CHECK(filter_units(t, "^g").at("A").size() == 2);
}

TEST_CASE("invalid patterns") {
  CHECK(kind_of([] { validate_pattern("("); }) == ErrorKind::InvalidPattern);
  CHECK(kind_of([] { validate_pattern("(a)\\1"); }) == ErrorKind::InvalidPattern);
  CHECK(kind_of([] { validate_pattern("a(?=b)"); }) == ErrorKind::InvalidPattern);
  CHECK(kind_of([] { validate_pattern("(?<!a)b"); }) == ErrorKind::InvalidPattern);
  CHECK_NOTHROW(validate_pattern("\\bghe\\w*"));
  ScoreTable t{{"A", {{"x", 1.0}}}};
  CHECK(filter_units(filter_units(t, "x"), "x") == filter_units(t, "x"));
}

TEST_CASE("visualizer arguments") {
  VisualizerArgs args;
  args.top_k = 5;
  args.unit_filter_list = {"ghe"};
  CHECK(kind_of([&] { args.validate(); }) == ErrorKind::ConfigError);
  args.unit_filter_list.clear();
  CHECK_NOTHROW(args.validate());
  args.filter_regex = "(";
  CHECK(kind_of([&] { args.validate(); }) == ErrorKind::InvalidPattern);
}

TEST_CASE("bar chart with top k") {
  const auto doc = inspect({"region:nominal:spatial"});
  VisualizerArgs args;
  args.top_k = 2;
  const auto chart = render_one(doc, args, ChartType::bar);
  const auto& values = chart.spec["data"]["values"];
  std::map<std::string, int> per_region;
  for (const auto& v : values) ++per_region[v["v0"].get<std::string>()];
  for (const auto& [region, n] : per_region) CHECK(n <= 2);
  CHECK(chart.spec["mark"]["type"] == "bar");
  CHECK(chart.spec["encoding"]["x"]["title"] == "region");
  CHECK(chart.spec["params"][0]["name"] == "unit_regex");
  CHECK(chart.spec["usermeta"]["lexivar"]["chart_type"] == "bar");
  CHECK(chart.file_stem() == "pmi__bar");
}

TEST_CASE("toy bar document has two bars per tuple") {
  InspectionConfig config;
  config.source = DatasetSource::from_string("text\tlabel\na b a\tA\nb c\tB\n", TableFormat::tsv);
  config.texts = {"text"};
  config.variables = {decl("label:nominal:general")};
  config.metrics = {"pmi"};
  const auto doc = run_inspection(config, {1, true});
  VisualizerArgs args;
  args.top_k = 2;
  const auto chart = render_one(doc, args, ChartType::bar);
  std::map<std::string, int> bars;
  for (const auto& v : chart.spec["data"]["values"]) ++bars[v["v0"].get<std::string>()];
  CHECK(bars == std::map<std::string, int>{{"A", 2}, {"B", 2}});
}

TEST_CASE("filters") {
  const auto doc = inspect({"region:nominal:spatial"});
  VisualizerArgs args;
  args.filter_regex = "ghe";
  CHECK(units_in(render_one(doc, args, ChartType::bar).spec["data"]["values"]) == std::set<std::string>{"ghe"});
  args.filter_regex.reset();
  args.unit_filter_list = {"roma", "xe"};
  CHECK(units_in(render_one(doc, args, ChartType::bar).spec["data"]["values"]) ==
        std::set<std::string>{"roma", "xe"});

  args.unit_filter_list = {"absent"};
  Warnings warnings;
  const auto plan = plan_charts("pmi", doc.declarations()).front();
  CHECK_FALSE(render_chart(plan, doc, args, warnings).has_value());
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].rfind("EmptySlice", 0) == 0);
}

TEST_CASE("color scale follows the metric sign") {
  const auto signed_doc = inspect({"region:nominal:spatial", "group:nominal:general"}, {"pmi"});
  const auto heat = render_one(signed_doc, {}, ChartType::heatmap);
  CHECK(heat.spec["encoding"]["color"]["scale"]["scheme"] == "redblue");
  CHECK(heat.spec["encoding"]["color"]["scale"]["domainMid"] == 0);
  const auto positive_doc = inspect({"region:nominal:spatial", "group:nominal:general"}, {"p_pmi"});
  CHECK(render_one(positive_doc, {}, ChartType::heatmap).spec["encoding"]["color"]["scale"]["scheme"] == "viridis");
  CHECK(heat.spec["params"][0]["name"] == "unit_select");
}

TEST_CASE("three variables get a value dropdown") {
  const auto doc = inspect({"region:nominal:spatial", "group:nominal:general", "year:ordinal:temporal"});
  const auto chart = render_one(doc, {}, ChartType::heatmap);
  REQUIRE(chart.spec["params"].size() == 2);
  CHECK(chart.spec["params"][1]["bind"]["options"] == json::array({"2019", "2020", "2021"}));
  CHECK(chart.spec["transform"].size() == 2);
}

TEST_CASE("line and scatter charts") {
  const auto line = render_one(inspect({"year:ordinal:temporal"}), {}, ChartType::line);
  CHECK(line.spec["encoding"]["color"]["field"] == "unit");
  const auto numeric_line = render_one(inspect({"year:quantitative:temporal", "group:nominal:general"}), {},
                                       ChartType::line);
  CHECK(numeric_line.spec["encoding"]["x"]["type"] == "quantitative");
  CHECK(numeric_line.spec["encoding"]["color"]["title"] == "group");
  const auto scatter = render_one(inspect({"score:quantitative:general"}), {}, ChartType::scatter);
  CHECK(scatter.spec["data"]["values"][0]["v0"].is_number());
}

TEST_CASE("maps") {
  const auto points = render_one(inspect({"lat:coordinate:spatial", "lon:coordinate:spatial"}), {},
                                 ChartType::geo_scatter);
  CHECK(points.spec["mark"]["type"] == "circle");
  CHECK(points.spec["encoding"]["latitude"]["field"] == "v0");
  CHECK(points.spec["projection"]["type"] == "mercator");

  VisualizerArgs args;
  args.background = parse_geometry(kRegions);
  const auto binned = render_one(inspect({"lat:coordinate:spatial:bins=3", "lon:coordinate:spatial:bins=3"}),
                                 args, ChartType::binned_map);
  REQUIRE(binned.spec["layer"].size() == 2);
  const auto& data_layer = binned.spec["layer"][1];
  CHECK(data_layer["encoding"]["latitude2"]["field"] == "v0_hi");
  CHECK(data_layer["data"]["values"][0]["v1_lo"].is_number());
}

TEST_CASE("choropleth joins regions case-insensitively") {
  const auto doc = inspect({"region:nominal:spatial"});
  VisualizerArgs args;
  args.geometry = parse_geometry(kRegions);
  CHECK(args.geometry->has_feature("VENETO"));
  CHECK_FALSE(args.geometry->has_feature("Sicilia"));
  const auto chart = render_one(doc, args, ChartType::choropleth);
  REQUIRE(chart.spec["layer"].size() == 2);
  const auto& regions = chart.spec["layer"][1];
  CHECK(regions["encoding"]["shape"]["field"] == "geo");
  CHECK(regions["data"]["values"][0].contains("__key"));
  REQUIRE(chart.warnings.size() == 1);
  CHECK(chart.warnings[0].rfind("GeometryMismatch", 0) == 0);
  CHECK(chart.warnings[0].find("Sicilia") != std::string::npos);
}

TEST_CASE("geometry errors") {
  CHECK(kind_of([] { parse_geometry("{"); }) == ErrorKind::GeometryError);
  CHECK(kind_of([] { parse_geometry(R"({"type":"Feature"})"); }) == ErrorKind::GeometryError);
  CHECK(kind_of([] { load_geometry("/nonexistent.geojson"); }) == ErrorKind::FileNotFound);
}

TEST_CASE("tuple-level metrics chart their fields") {
  const auto doc = inspect({"region:nominal:spatial"}, {"stats", "ttr"});
  const auto chart = render_one(doc, {}, ChartType::bar);
  CHECK(units_in(chart.spec["data"]["values"]).contains("vocab_size"));
}

TEST_CASE("html embeds the spec safely") {
  ChartDocument chart;
  chart.plan.metric_id = "pmi";
  chart.spec = {{"title", "</script><b>"}};
  const auto html = render_html(chart);
  CHECK(html.find("vega-lite@5") != std::string::npos);
  CHECK(html.find("</script><b>") == std::string::npos);
  CHECK(html.find("<\\/script><b>") != std::string::npos);
}

TEST_CASE("visualize writes one file per plan and format") {
  const auto dir = support::scratch_dir("charts");
  const auto doc = inspect({"region:nominal:spatial"}, {"pmi", "stats"});
  VisualizerArgs args;
  args.output_dir = (dir / "out").string();
  args.geometry = parse_geometry(kRegions);
  const auto result = visualize(doc, args);
  CHECK(result.charts.size() == 4);  // bar + choropleth per metric
  CHECK(result.files.size() == 8);
  CHECK(std::filesystem::exists(dir / "out" / "pmi__choropleth.html"));
  CHECK(std::filesystem::exists(dir / "out" / "stats__bar.json"));
  CHECK(json::parse(support::read_file(dir / "out" / "pmi__bar.json")) == result.charts[0].spec);
  CHECK(kind_of([&] { visualize(doc, args, {"maas"}); }) == ErrorKind::ConfigError);
}
