#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>
#include <nlohmann/json.hpp>

#include "obscura/analytic_engine.hpp"
#include "obscura/report_io.hpp"
#include "obscura/scenario_io.hpp"

#include "test_support.hpp"

using namespace obscura;

#ifndef OBSCURA_SCENARIO_DIR
#define OBSCURA_SCENARIO_DIR "scenarios"
#endif

namespace {

std::string fixture_path(const std::string& name) {
  return std::string(OBSCURA_SCENARIO_DIR) + "/" + name;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

TEST_CASE("the bundled fixture parses to the worked scenario") {
  const Scenario parsed = load_scenario_file(fixture_path("paper-8-1.json"));
  REQUIRE(parsed == test_support::worked_scenario());

  const ResidualThreat r =
      residual_threat(parsed.population, parsed.stack, parsed.composition_mode);
  REQUIRE(std::llround(r.total) == 26500);
}

TEST_CASE("missing required fields are named") {
  try {
    parse_scenario(R"({"measures": [], "baseline": {"time_hours": 1, "population": 1}, "risk": {"aro": 0, "av": 0, "ef": 0}})");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(e.kind() == ParseError::Kind::MissingField);
    REQUIRE(std::string(e.what()).find("population") != std::string::npos);
  }
}

TEST_CASE("unknown keys are rejected everywhere") {
  const std::string base = R"({
    "population": {"worms": 1},
    "measures": [],
    "baseline": {"time_hours": 1, "population": 1},
    "risk": {"aro": 0, "av": 0, "ef": 0}
  })";

  auto with_key = [&](const std::string& doc) {
    try {
      parse_scenario(doc);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(e.kind() == ParseError::Kind::UnknownKey);
    }
  };

  with_key(R"({"population": {}, "measures": [], "baseline": {"time_hours": 1, "population": 1}, "risk": {"aro": 0, "av": 0, "ef": 0}, "populaton": {}})");
  with_key(R"({"population": {"wurms": 1}, "measures": [], "baseline": {"time_hours": 1, "population": 1}, "risk": {"aro": 0, "av": 0, "ef": 0}})");
  with_key(R"({"population": {}, "measures": [{"name": "m", "filter_fractions": {"worms": 0.1, "hacker": 0.1}}], "baseline": {"time_hours": 1, "population": 1}, "risk": {"aro": 0, "av": 0, "ef": 0}})");
  REQUIRE_NOTHROW(parse_scenario(base));
}

TEST_CASE("malformed documents surface a syntax error with position") {
  try {
    parse_scenario("{\"population\": ");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(e.kind() == ParseError::Kind::Syntax);
    // nlohmann reports the byte offset of the failure.
    REQUIRE(std::string(e.what()).find("SyntaxError") != std::string::npos);
  }
}

TEST_CASE("catalog references resolve and unknown names fail loudly") {
  const std::string doc = R"({
    "population": {"worms": 10},
    "measures": ["banner-obfuscation"],
    "baseline": {"time_hours": 1, "population": 1},
    "risk": {"aro": 0, "av": 0, "ef": 0}
  })";
  const Scenario s = parse_scenario(doc);
  REQUIRE(s.stack.measures.size() == 1);
  REQUIRE(s.stack.measures[0] == lookup("banner-obfuscation").measure);

  REQUIRE_THROWS_AS(
      parse_scenario(R"({
        "population": {},
        "measures": ["no-such-measure"],
        "baseline": {"time_hours": 1, "population": 1},
        "risk": {"aro": 0, "av": 0, "ef": 0}
      })"),
      UnknownMeasureError);

  // Objects without fractions must also name a real catalog entry.
  REQUIRE_THROWS_AS(
      parse_scenario(R"({
        "population": {},
        "measures": [{"name": "banner-obfuscatoin"}],
        "baseline": {"time_hours": 1, "population": 1},
        "risk": {"aro": 0, "av": 0, "ef": 0}
      })"),
      UnknownMeasureError);
}

TEST_CASE("catalog entries accept work-factor overrides") {
  const Scenario s = parse_scenario(R"({
    "population": {"hackers": 10},
    "measures": [{"name": "banner-obfuscation", "work_factors": {"hackers": 2.5}}],
    "baseline": {"time_hours": 1, "population": 1},
    "risk": {"aro": 0, "av": 0, "ef": 0}
  })");
  const auto& m = s.stack.measures[0];
  REQUIRE(m.filter_fractions == lookup("banner-obfuscation").measure.filter_fractions);
  REQUIRE(m.work_factor(AttackerKind::Hacker) == 2.5);
  REQUIRE(m.work_factor(AttackerKind::Worm) == 1.0);
}

TEST_CASE("inline measures default omitted classes to the identity") {
  const Scenario s = parse_scenario(R"({
    "population": {},
    "measures": [{"name": "custom", "filter_fractions": {"worms": 0.4, "bots": 0.3, "skids": 0.2}}],
    "baseline": {"time_hours": 1, "population": 1},
    "risk": {"aro": 0, "av": 0, "ef": 0}
  })");
  const auto& m = s.stack.measures[0];
  REQUIRE(m.filter_fraction(AttackerKind::Hacker) == 0.0);
  REQUIRE(m.work_factor(AttackerKind::Hacker) == 1.0);
  REQUIRE(m.filter_fraction(AttackerKind::Worm) == 0.4);
}

TEST_CASE("validation failures propagate from parsing") {
  try {
    parse_scenario(R"({
      "population": {},
      "measures": [{"name": "m", "filter_fractions": {"worms": 1.3}}],
      "baseline": {"time_hours": 1, "population": 1},
      "risk": {"aro": 0, "av": 0, "ef": 0}
    })");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    REQUIRE(e.has(ValidationCode::FractionOutOfRange));
  }
}

TEST_CASE("parse, serialize, parse round-trips to an equal scenario") {
  const Scenario first = load_scenario_file(fixture_path("paper-8-1.json"));
  const Scenario second = parse_scenario(scenario_to_json(first));
  REQUIRE(first == second);

  const Scenario fleet = load_scenario_file(fixture_path("randomized-fleet.json"));
  REQUIRE(parse_scenario(scenario_to_json(fleet)) == fleet);
}

TEST_CASE("property: serialization round-trips random scenarios") {
  TrialRng rng(4242);
  int checked = 0;
  for (int i = 0; i < 120; ++i) {
    const Scenario s = test_support::random_scenario(rng);
    if (!check_scenario(s).empty()) continue;
    REQUIRE(parse_scenario(scenario_to_json(s)) == s);
    ++checked;
  }
  REQUIRE(checked == 120);
}

TEST_CASE("report emission is deterministic") {
  const Scenario s = test_support::worked_scenario();
  const AnalyticReport report = analyze(s);
  REQUIRE(emit_report(report, ReportFormat::Json) ==
          emit_report(report, ReportFormat::Json));
  REQUIRE(emit_report(report, ReportFormat::Csv) ==
          emit_report(report, ReportFormat::Csv));
}

TEST_CASE("the worked analytic report carries the residual verbatim") {
  const std::string json =
      emit_report(analyze(test_support::worked_scenario()), ReportFormat::Json);
  REQUIRE(json.find("\"residual_total\":26500") != std::string::npos);
  REQUIRE(json.find("\"residual_fraction\":0.265") != std::string::npos);
  REQUIRE(json.find("\"scaled_time_hours\":90.566") != std::string::npos);
}

TEST_CASE("JSON and CSV renderings agree on every numeric value") {
  const AnalyticReport report = analyze(test_support::worked_scenario());
  const auto doc = nlohmann::json::parse(emit_report(report, ReportFormat::Json));

  std::istringstream csv(emit_report(report, ReportFormat::Csv));
  std::string header_line;
  std::string value_line;
  std::getline(csv, header_line);
  std::getline(csv, value_line);
  const auto headers = split_csv_line(header_line);
  const auto values = split_csv_line(value_line);
  REQUIRE(headers.size() == values.size());

  auto field = [&](const std::string& name) {
    for (std::size_t i = 0; i < headers.size(); ++i) {
      if (headers[i] == name) return values[i];
    }
    FAIL("missing CSV column " + name);
    return std::string();
  };

  auto json_token = [&](const nlohmann::json& v) {
    return obscura::detail::format_number(v.get<double>());
  };

  REQUIRE(field("residual_total") == json_token(doc["residual_total"]));
  REQUIRE(field("residual_fraction") == json_token(doc["residual_fraction"]));
  REQUIRE(field("scaled_time_hours") == json_token(doc["scaled_time_hours"]));
  REQUIRE(field("ale") == json_token(doc["ale"]));
  REQUIRE(field("aggregate_rate_per_hour") ==
          json_token(doc["aggregate_rate_per_hour"]));
  for (auto kind : kAttackerKinds) {
    const std::string name(to_string(kind));
    REQUIRE(field("residual_" + name + "s") ==
            json_token(doc["residual_counts"][name + "s"]));
  }
}

TEST_CASE("infinities serialize as a quoted token in both formats") {
  Scenario s = test_support::worked_scenario();
  s.population = test_support::make_population(0, 0, 0, 0);
  const AnalyticReport report = analyze(s);
  const std::string json = emit_report(report, ReportFormat::Json);
  REQUIRE(json.find("\"scaled_time_hours\":\"infinity\"") != std::string::npos);
  const std::string csv = emit_report(report, ReportFormat::Csv);
  REQUIRE(csv.find("infinity") != std::string::npos);
}

TEST_CASE("missing scenario files raise an IO parse error") {
  REQUIRE_THROWS_AS(load_scenario_file("/nonexistent/scenario.json"),
                    ParseError);
}
