#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "obscura/measure_catalog.hpp"
#include "obscura/threat_model.hpp"

// JSON scenario files. The schema is strict: unknown keys are rejected at
// every level, so a typo in a fraction name cannot silently default a risk
// number. Catalog name references are resolved before validation.

namespace obscura {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Io, Syntax, MissingField, UnknownKey, BadValue };

  ParseError(Kind kind, const std::string& message)
      : std::runtime_error(prefix(kind) + message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  static std::string prefix(Kind kind) {
    switch (kind) {
      case Kind::Io: return "IoError: ";
      case Kind::Syntax: return "SyntaxError: ";
      case Kind::MissingField: return "MissingField: ";
      case Kind::UnknownKey: return "UnknownKey: ";
      case Kind::BadValue: return "BadValue: ";
    }
    return "";
  }

  Kind kind_;
};

namespace detail {

using json = nlohmann::json;

inline const std::array<std::string, 4>& class_keys() {
  static const std::array<std::string, 4> keys = {"worms", "bots", "skids",
                                                  "hackers"};
  return keys;
}

inline void reject_unknown_keys(const json& obj, std::string_view where,
                                std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed)
      if (key == a) ok = true;
    if (!ok) {
      throw ParseError(ParseError::Kind::UnknownKey,
                       "unknown key '" + key + "' in " + std::string(where));
    }
  }
}

inline const json& require_field(const json& obj, std::string_view key,
                                 std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(ParseError::Kind::MissingField,
                     std::string(where) + " is missing required field '" +
                         std::string(key) + "'");
  }
  return *it;
}

inline const json& require_object(const json& value, std::string_view where) {
  if (!value.is_object()) {
    throw ParseError(ParseError::Kind::BadValue,
                     std::string(where) + " must be an object");
  }
  return value;
}

inline double require_number(const json& value, std::string_view where) {
  if (!value.is_number()) {
    throw ParseError(ParseError::Kind::BadValue,
                     std::string(where) + " must be a number");
  }
  return value.get<double>();
}

inline std::int64_t require_integer(const json& value, std::string_view where) {
  if (!value.is_number_integer()) {
    throw ParseError(ParseError::Kind::BadValue,
                     std::string(where) + " must be an integer");
  }
  return value.get<std::int64_t>();
}

inline std::string require_string(const json& value, std::string_view where) {
  if (!value.is_string()) {
    throw ParseError(ParseError::Kind::BadValue,
                     std::string(where) + " must be a string");
  }
  return value.get<std::string>();
}

// Fills a per-class table from a possibly partial {worms,bots,skids,hackers}
// object; classes the document does not mention keep their current values.
inline void parse_per_class(const json& obj, std::string_view where,
                            PerClass<double>& table) {
  require_object(obj, where);
  reject_unknown_keys(obj, where, {"worms", "bots", "skids", "hackers"});
  for (std::size_t i = 0; i < kAttackerKindCount; ++i) {
    auto it = obj.find(class_keys()[i]);
    if (it == obj.end()) continue;
    table[i] = require_number(*it, std::string(where) + "." + class_keys()[i]);
  }
}

inline ObscurityMeasure parse_measure(const json& entry, std::size_t position) {
  const std::string where = "measures[" + std::to_string(position) + "]";
  if (entry.is_string()) {
    return lookup(entry.get<std::string>()).measure;  // catalog reference
  }
  require_object(entry, where);
  reject_unknown_keys(entry, where,
                      {"name", "filter_fractions", "work_factors",
                       "independent", "group"});
  const std::string name =
      require_string(require_field(entry, "name", where), where + ".name");

  ObscurityMeasure measure;
  if (entry.contains("filter_fractions")) {
    measure.name = name;  // fully inline measure
    parse_per_class(entry["filter_fractions"], where + ".filter_fractions",
                    measure.filter_fractions);
  } else {
    // Catalog base with overrides; an unknown name without fractions is an
    // error rather than a silent identity measure.
    measure = lookup(name).measure;
  }
  if (entry.contains("work_factors")) {
    parse_per_class(entry["work_factors"], where + ".work_factors",
                    measure.work_factors);
  }
  if (entry.contains("independent")) {
    const json& v = entry["independent"];
    if (!v.is_boolean()) {
      throw ParseError(ParseError::Kind::BadValue,
                       where + ".independent must be a boolean");
    }
    measure.independent = v.get<bool>();
  }
  if (entry.contains("group")) {
    measure.group = require_string(entry["group"], where + ".group");
  }
  return measure;
}

}  // namespace detail

// Parses and validates a scenario document. Throws ParseError for malformed
// or off-schema documents, UnknownMeasureError for unresolved catalog
// references, and ValidationError when the parsed scenario violates a type
// invariant.
inline Scenario parse_scenario(std::string_view text) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(ParseError::Kind::Syntax, e.what());
  }
  detail::require_object(doc, "scenario document");
  detail::reject_unknown_keys(doc, "scenario document",
                              {"population", "measures", "baseline", "risk",
                               "fleet", "epoch_hours", "composition_mode"});

  Scenario scenario;

  const json& population =
      detail::require_object(detail::require_field(doc, "population",
                                                   "scenario document"),
                             "population");
  detail::reject_unknown_keys(population, "population",
                              {"worms", "bots", "skids", "hackers"});
  for (std::size_t i = 0; i < kAttackerKindCount; ++i) {
    auto it = population.find(detail::class_keys()[i]);
    if (it == population.end()) continue;  // absent classes count 0
    scenario.population.counts[i] =
        detail::require_integer(*it, "population." + detail::class_keys()[i]);
  }

  const json& measures =
      detail::require_field(doc, "measures", "scenario document");
  if (!measures.is_array()) {
    throw ParseError(ParseError::Kind::BadValue, "measures must be an array");
  }
  for (std::size_t i = 0; i < measures.size(); ++i) {
    scenario.stack.measures.push_back(detail::parse_measure(measures[i], i));
  }

  const json& baseline =
      detail::require_object(detail::require_field(doc, "baseline",
                                                   "scenario document"),
                             "baseline");
  detail::reject_unknown_keys(baseline, "baseline",
                              {"time_hours", "population"});
  scenario.baseline_time_hours = detail::require_number(
      detail::require_field(baseline, "time_hours", "baseline"),
      "baseline.time_hours");
  scenario.baseline_population = detail::require_integer(
      detail::require_field(baseline, "population", "baseline"),
      "baseline.population");

  const json& risk = detail::require_object(
      detail::require_field(doc, "risk", "scenario document"), "risk");
  detail::reject_unknown_keys(risk, "risk", {"aro", "av", "ef"});
  scenario.risk.aro =
      detail::require_number(detail::require_field(risk, "aro", "risk"),
                             "risk.aro");
  scenario.risk.av =
      detail::require_number(detail::require_field(risk, "av", "risk"),
                             "risk.av");
  scenario.risk.ef =
      detail::require_number(detail::require_field(risk, "ef", "risk"),
                             "risk.ef");

  if (doc.contains("fleet")) {
    const json& fleet = detail::require_object(doc["fleet"], "fleet");
    detail::reject_unknown_keys(
        fleet, "fleet", {"instances", "secret_mode", "per_instance_probability"});
    FleetConfig config;
    config.instances = detail::require_integer(
        detail::require_field(fleet, "instances", "fleet"), "fleet.instances");
    const std::string mode = detail::require_string(
        detail::require_field(fleet, "secret_mode", "fleet"),
        "fleet.secret_mode");
    if (auto parsed = secret_mode_from_string(mode)) {
      config.secret_mode = *parsed;
    } else {
      throw ParseError(ParseError::Kind::BadValue,
                       "fleet.secret_mode must be 'shared' or "
                       "'per-instance-randomized', got '" + mode + "'");
    }
    config.per_instance_compromise_probability = detail::require_number(
        detail::require_field(fleet, "per_instance_probability", "fleet"),
        "fleet.per_instance_probability");
    scenario.fleet = config;
  }

  if (doc.contains("epoch_hours")) {
    scenario.epoch_hours =
        detail::require_number(doc["epoch_hours"], "epoch_hours");
  }

  if (doc.contains("composition_mode")) {
    const std::string mode =
        detail::require_string(doc["composition_mode"], "composition_mode");
    if (auto parsed = composition_mode_from_string(mode)) {
      scenario.composition_mode = *parsed;
    } else {
      throw ParseError(ParseError::Kind::BadValue,
                       "composition_mode must be 'additive' or "
                       "'multiplicative-survival', got '" + mode + "'");
    }
  }

  return validate_scenario(std::move(scenario));
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError(ParseError::Kind::Io,
                     "cannot open scenario file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

// Canonical serialization: measures fully inline, every per-class entry
// explicit, doubles at round-trip precision. parse(scenario_to_json(s)) == s
// for any validated scenario.
inline std::string scenario_to_json(const Scenario& scenario) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json population;
  for (std::size_t i = 0; i < kAttackerKindCount; ++i) {
    population[detail::class_keys()[i]] = scenario.population.counts[i];
  }
  doc["population"] = std::move(population);

  nlohmann::ordered_json measures = nlohmann::ordered_json::array();
  for (const auto& m : scenario.stack.measures) {
    nlohmann::ordered_json entry;
    entry["name"] = m.name;
    nlohmann::ordered_json fractions;
    nlohmann::ordered_json factors;
    for (std::size_t i = 0; i < kAttackerKindCount; ++i) {
      fractions[detail::class_keys()[i]] = m.filter_fractions[i];
      factors[detail::class_keys()[i]] = m.work_factors[i];
    }
    entry["filter_fractions"] = std::move(fractions);
    entry["work_factors"] = std::move(factors);
    entry["independent"] = m.independent;
    if (m.group) entry["group"] = *m.group;
    measures.push_back(std::move(entry));
  }
  doc["measures"] = std::move(measures);

  doc["baseline"] = {{"time_hours", scenario.baseline_time_hours},
                     {"population", scenario.baseline_population}};
  doc["risk"] = {{"aro", scenario.risk.aro},
                 {"av", scenario.risk.av},
                 {"ef", scenario.risk.ef}};
  if (scenario.fleet) {
    doc["fleet"] = {
        {"instances", scenario.fleet->instances},
        {"secret_mode", std::string(to_string(scenario.fleet->secret_mode))},
        {"per_instance_probability",
         scenario.fleet->per_instance_compromise_probability}};
  }
  if (scenario.epoch_hours) doc["epoch_hours"] = *scenario.epoch_hours;
  doc["composition_mode"] = std::string(to_string(scenario.composition_mode));
  return doc.dump(2) + "\n";
}

}  // namespace obscura
