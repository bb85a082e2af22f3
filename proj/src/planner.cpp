#include <algorithm>
#include <regex>

#include "lexivar/charts.hpp"

namespace lexivar {

std::string_view to_string(ChartType type) {
  switch (type) {
    case ChartType::bar: return "bar";
    case ChartType::line: return "line";
    case ChartType::heatmap: return "heatmap";
    case ChartType::scatter: return "scatter";
    case ChartType::geo_scatter: return "geo_scatter";
    case ChartType::binned_map: return "binned_map";
    case ChartType::choropleth: return "choropleth";
  }
  return "bar";
}

std::string_view to_string(Channel channel) {
  switch (channel) {
    case Channel::x: return "x";
    case Channel::y: return "y";
    case Channel::color: return "color";
    case Channel::size: return "size";
    case Channel::lat: return "lat";
    case Channel::lon: return "lon";
    case Channel::region: return "region";
    case Channel::unit_filter: return "unit_filter";
    case Channel::dropdown: return "dropdown";
  }
  return "x";
}

std::string_view to_string(UnitWidget widget) {
  return widget == UnitWidget::dropdown ? "dropdown" : "regex_search";
}

std::size_t ChartPlan::dimensions() const { return variables.size() + 2; }

std::vector<Channel> ChartPlan::channels_of(std::string_view role) const {
  std::vector<Channel> out;
  for (const auto& a : assignments) {
    if (a.role == role) out.push_back(a.channel);
  }
  return out;
}

nlohmann::json to_json(const ChartPlan& plan) {
  nlohmann::json assignments = nlohmann::json::array();
  for (const auto& a : plan.assignments) {
    assignments.push_back({{"role", a.role}, {"channel", std::string(to_string(a.channel))}});
  }
  nlohmann::json variables = nlohmann::json::array();
  for (const auto& v : plan.variables) variables.push_back(v.name);
  return {{"chart_type", std::string(to_string(plan.chart_type))},
          {"metric", plan.metric_id},
          {"assignments", assignments},
          {"unit_widget", std::string(to_string(plan.unit_widget))},
          {"variables", variables},
          {"dimensions", plan.dimensions()}};
}

namespace {

[[noreturn]] void unsupported(const std::string& what, const std::string& remedy) {
  throw Error(ErrorKind::UnsupportedCombination, what + "; " + remedy);
}

/// Binned quantitative variables plot as ordered categories.
bool categorical(const VariableDecl& d) {
  return d.type == VarType::nominal || d.type == VarType::ordinal ||
         (d.type == VarType::quantitative && d.is_binned());
}

std::string describe(const VariableDecl& d) {
  std::string s = d.name + "(" + std::string(to_string(d.type)) + "/" + std::string(to_string(d.semantics));
  if (d.bins) s += ", bins=" + std::to_string(*d.bins);
  return s + ")";
}

ChartPlan make_plan(ChartType type, const std::string& metric, std::vector<VariableDecl> vars,
                    std::vector<ChannelAssignment> assignments) {
  ChartPlan plan;
  plan.chart_type = type;
  plan.metric_id = metric;
  plan.variables = std::move(vars);
  plan.assignments = std::move(assignments);
  plan.unit_widget = plan.dimensions() <= 3 ? UnitWidget::regex_search : UnitWidget::dropdown;
  plan.assignments.push_back({std::string(kUnitRole), Channel::unit_filter});
  return plan;
}

}  // namespace

std::vector<ChartPlan> plan_charts(const std::string& metric_id,
                                   const std::vector<VariableDecl>& input, bool has_geometry) {
  parse_metric(metric_id);
  const std::string score(kScoreRole);
  const std::string unit(kUnitRole);

  std::vector<VariableDecl> decls;
  for (auto decl : input) {
    try {
      decl.validate();
    } catch (const Error& e) {
      unsupported(std::string("invalid variable declaration: ") + e.what(),
                  "fix the declaration (coordinates need spatial semantics and a latitude/longitude axis)");
    }
    decls.push_back(std::move(decl));
  }

  std::vector<const VariableDecl*> coords;
  std::vector<const VariableDecl*> others;
  for (const auto& d : decls) (d.type == VarType::coordinate ? coords : others).push_back(&d);

  if (!coords.empty()) {
    const VariableDecl* lat = nullptr;
    const VariableDecl* lon = nullptr;
    for (const auto* c : coords) {
      auto& slot = c->axis == Axis::latitude ? lat : lon;
      if (slot) unsupported("more than one " + std::string(to_string(*c->axis)) + " variable",
                            "declare exactly one latitude and one longitude coordinate");
      slot = c;
    }
    if (!lat || !lon) {
      unsupported("a coordinate needs its counterpart axis",
                  "declare both a latitude and a longitude coordinate variable");
    }
    if (!others.empty()) {
      unsupported("coordinates combined with other variables (" + describe(*others.front()) + ")",
                  "run a separate inspection with only the latitude/longitude pair");
    }
    if (lat->is_binned() != lon->is_binned()) {
      unsupported("only one coordinate axis is binned",
                  "declare bins for both latitude and longitude, or for neither");
    }
    const auto type = lat->is_binned() ? ChartType::binned_map : ChartType::geo_scatter;
    return {make_plan(type, metric_id, {*lat, *lon},
                      {{lat->name, Channel::lat}, {lon->name, Channel::lon}, {score, Channel::color}})};
  }

  if (others.size() > 3) {
    unsupported(std::to_string(others.size()) + " variables exceed the " +
                    std::to_string(kMaxDimensions) + "-dimension chart budget",
                "inspect at most three variables at a time (score and unit take two dimensions)");
  }

  if (others.empty()) {
    return {make_plan(ChartType::bar, metric_id, {}, {{unit, Channel::x}, {score, Channel::y}})};
  }

  if (others.size() == 1) {
    const auto& v = *others.front();
    if (categorical(v)) {
      switch (v.semantics) {
        case Semantics::general:
          return {make_plan(ChartType::bar, metric_id, {v}, {{v.name, Channel::x}, {score, Channel::y}})};
        case Semantics::temporal:
          return {make_plan(ChartType::line, metric_id, {v},
                            {{v.name, Channel::x}, {score, Channel::y}, {unit, Channel::color}})};
        case Semantics::spatial: {
          std::vector<ChartPlan> plans{
              make_plan(ChartType::bar, metric_id, {v}, {{v.name, Channel::x}, {score, Channel::y}})};
          if (has_geometry) {
            plans.push_back(make_plan(ChartType::choropleth, metric_id, {v},
                                      {{v.name, Channel::region}, {score, Channel::color}}));
          }
          return plans;
        }
      }
    }
    // Unbinned quantitative.
    if (v.semantics == Semantics::temporal) {
      return {make_plan(ChartType::line, metric_id, {v},
                        {{v.name, Channel::x}, {score, Channel::y}, {unit, Channel::color}})};
    }
    return {make_plan(ChartType::scatter, metric_id, {v}, {{v.name, Channel::x}, {score, Channel::y}})};
  }

  if (others.size() == 2) {
    const auto& a = *others[0];
    const auto& b = *others[1];
    if (categorical(a) && categorical(b)) {
      return {make_plan(ChartType::heatmap, metric_id, {a, b},
                        {{a.name, Channel::x}, {b.name, Channel::y}, {score, Channel::color}})};
    }
    // A continuous time axis with one categorical series variable.
    const bool a_time = !categorical(a) && a.semantics == Semantics::temporal;
    const bool b_time = !categorical(b) && b.semantics == Semantics::temporal;
    if (a_time != b_time && (a_time ? categorical(b) : categorical(a))) {
      const auto& time = a_time ? a : b;
      const auto& series = a_time ? b : a;
      return {make_plan(ChartType::line, metric_id, {a, b},
                        {{time.name, Channel::x}, {score, Channel::y}, {series.name, Channel::color}})};
    }
    unsupported("unbinned quantitative variables in a pair: " + describe(a) + ", " + describe(b),
                "add bins=K to the quantitative variable(s), or use one temporal quantitative variable "
                "with one categorical variable");
  }

  for (const auto* v : others) {
    if (!categorical(*v)) {
      unsupported("unbinned quantitative variable " + describe(*v) + " in a three-variable chart",
                  "add bins=K so it can be used as a heatmap axis or dropdown");
    }
  }
  const auto& a = *others[0];
  const auto& b = *others[1];
  const auto& c = *others[2];
  return {make_plan(ChartType::heatmap, metric_id, {a, b, c},
                    {{a.name, Channel::x}, {b.name, Channel::y}, {score, Channel::color},
                     {c.name, Channel::dropdown}})};
}

void validate_pattern(const std::string& pattern) {
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == '\\' && i + 1 < pattern.size()) {
      const char next = pattern[i + 1];
      if (next >= '1' && next <= '9') {
        throw Error(ErrorKind::InvalidPattern, "backreferences are not supported: '" + pattern + "'");
      }
      ++i;
      continue;
    }
    if (pattern.compare(i, 3, "(?=") == 0 || pattern.compare(i, 3, "(?!") == 0 ||
        pattern.compare(i, 3, "(?<") == 0) {
      throw Error(ErrorKind::InvalidPattern, "lookaround is not supported: '" + pattern + "'");
    }
  }
  try {
    std::regex re(pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw Error(ErrorKind::InvalidPattern, "invalid pattern '" + pattern + "': " + e.what());
  }
}

ScoreTable filter_units(const ScoreTable& table, const std::string& pattern) {
  validate_pattern(pattern);
  const std::regex re(pattern, std::regex::ECMAScript);
  ScoreTable out;
  for (const auto& [tuple, units] : table) {
    std::map<std::string, double> kept;
    for (const auto& [unit, score] : units) {
      if (std::regex_search(unit, re)) kept.emplace(unit, score);
    }
    if (!kept.empty()) out.emplace(tuple, std::move(kept));
  }
  return out;
}

}  // namespace lexivar
