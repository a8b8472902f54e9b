#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace obscura {

// The four attacker classes. The set is closed: worms, bots and skids are
// automated go/no-go sources, hackers are humans who can learn past an
// obstacle at a work-factor cost.
enum class AttackerKind { Worm, Bot, Skid, Hacker };

inline constexpr std::array<AttackerKind, 4> kAttackerKinds = {
    AttackerKind::Worm, AttackerKind::Bot, AttackerKind::Skid,
    AttackerKind::Hacker};

inline constexpr std::size_t kAttackerKindCount = kAttackerKinds.size();

constexpr std::size_t index_of(AttackerKind kind) {
  return static_cast<std::size_t>(kind);
}

constexpr std::string_view to_string(AttackerKind kind) {
  switch (kind) {
    case AttackerKind::Worm: return "worm";
    case AttackerKind::Bot: return "bot";
    case AttackerKind::Skid: return "skid";
    case AttackerKind::Hacker: return "hacker";
  }
  return "worm";
}

constexpr bool is_learning_capable(AttackerKind kind) {
  return kind == AttackerKind::Hacker;
}

struct AttackerClass {
  AttackerKind kind = AttackerKind::Worm;
  bool learning_capable = false;

  bool operator==(const AttackerClass&) const = default;
};

constexpr AttackerClass default_attacker_class(AttackerKind kind) {
  return AttackerClass{kind, is_learning_capable(kind)};
}

// Fixed-size per-class table, indexed by index_of(kind).
template <typename T>
using PerClass = std::array<T, kAttackerKindCount>;

// Attack sources per class. total() == 0 is a legal degenerate population.
struct ThreatPopulation {
  PerClass<std::int64_t> counts{};

  std::int64_t& count(AttackerKind kind) { return counts[index_of(kind)]; }
  std::int64_t count(AttackerKind kind) const { return counts[index_of(kind)]; }

  std::int64_t total() const {
    std::int64_t sum = 0;
    for (auto c : counts) sum += c;
    return sum;
  }

  bool operator==(const ThreatPopulation&) const = default;
};

// One named defense layer. filter_fractions[c] is the probability that a
// class-c source is permanently filtered out (go/no-go); work_factors[c] is
// the multiplicative effort increase (lambda) for sources that are not
// filtered. Missing entries default to the identity (fraction 0, lambda 1)
// so partial catalogs compose.
//
// `independent` controls lambda composition: independent measures multiply,
// dependent measures contribute only the max lambda of their `group` (an
// unlabeled dependent measure falls into a shared anonymous group).
struct ObscurityMeasure {
  std::string name;
  PerClass<double> filter_fractions{};
  PerClass<double> work_factors{1.0, 1.0, 1.0, 1.0};
  bool independent = true;
  std::optional<std::string> group;

  double filter_fraction(AttackerKind kind) const {
    return filter_fractions[index_of(kind)];
  }
  double work_factor(AttackerKind kind) const {
    return work_factors[index_of(kind)];
  }

  bool operator==(const ObscurityMeasure&) const = default;
};

// Ordered list of measures; names must be pairwise distinct. All analytic
// results over a stack are independent of measure order.
struct DefenseStack {
  std::vector<ObscurityMeasure> measures;

  bool operator==(const DefenseStack&) const = default;
};

// How per-measure filter fractions combine into one per-class fraction.
// Additive is the default (capped at 1); MultiplicativeSurvival treats the
// fractions as independent removal probabilities, which stays well-posed
// when the additive sum exceeds 1.
enum class CompositionMode { Additive, MultiplicativeSurvival };

constexpr std::string_view to_string(CompositionMode mode) {
  return mode == CompositionMode::Additive ? "additive"
                                           : "multiplicative-survival";
}

inline std::optional<CompositionMode> composition_mode_from_string(
    std::string_view s) {
  if (s == "additive") return CompositionMode::Additive;
  if (s == "multiplicative-survival") return CompositionMode::MultiplicativeSurvival;
  return std::nullopt;
}

// ALE = ARO x (AV x EF). Currency is abstract units.
struct RiskParams {
  double aro = 0.0;  // events/year
  double av = 0.0;   // asset value
  double ef = 0.0;   // exposure factor in [0,1]

  bool operator==(const RiskParams&) const = default;
};

enum class SecretMode { Shared, PerInstanceRandomized };

constexpr std::string_view to_string(SecretMode mode) {
  return mode == SecretMode::Shared ? "shared" : "per-instance-randomized";
}

inline std::optional<SecretMode> secret_mode_from_string(std::string_view s) {
  if (s == "shared") return SecretMode::Shared;
  if (s == "per-instance-randomized") return SecretMode::PerInstanceRandomized;
  return std::nullopt;
}

// Fleet of M service instances. With a shared secret, one break compromises
// every instance; per-instance randomization makes compromises independent.
struct FleetConfig {
  std::int64_t instances = 1;
  SecretMode secret_mode = SecretMode::Shared;
  double per_instance_compromise_probability = 0.0;

  bool operator==(const FleetConfig&) const = default;
};

// A complete modeling scenario. baseline_time_hours is the mean
// time-to-compromise observed when baseline_population sources attack;
// times are hours everywhere.
struct Scenario {
  ThreatPopulation population;
  DefenseStack stack;
  double baseline_time_hours = 0.0;
  std::int64_t baseline_population = 0;
  RiskParams risk;
  std::optional<FleetConfig> fleet;
  std::optional<double> epoch_hours;
  CompositionMode composition_mode = CompositionMode::Additive;

  bool operator==(const Scenario&) const = default;
};

enum class ValidationCode {
  NegativeCount,
  FractionOutOfRange,
  WorkFactorBelowOne,
  DuplicateMeasureName,
  NonPositiveBaseline,
  EmptyMeasureName,
  NegativeValue,
  NonPositiveEpoch,
  InvalidFleet,
};

constexpr std::string_view to_string(ValidationCode code) {
  switch (code) {
    case ValidationCode::NegativeCount: return "NegativeCount";
    case ValidationCode::FractionOutOfRange: return "FractionOutOfRange";
    case ValidationCode::WorkFactorBelowOne: return "WorkFactorBelowOne";
    case ValidationCode::DuplicateMeasureName: return "DuplicateMeasureName";
    case ValidationCode::NonPositiveBaseline: return "NonPositiveBaseline";
    case ValidationCode::EmptyMeasureName: return "EmptyMeasureName";
    case ValidationCode::NegativeValue: return "NegativeValue";
    case ValidationCode::NonPositiveEpoch: return "NonPositiveEpoch";
    case ValidationCode::InvalidFleet: return "InvalidFleet";
  }
  return "NegativeCount";
}

struct ValidationIssue {
  ValidationCode code;
  std::string field;    // offending field, e.g. "filter_fractions.worm"
  std::string measure;  // offending measure name, empty when not measure-scoped
  std::string detail;

  std::string message() const {
    std::string out(to_string(code));
    out += ": field '";
    out += field;
    out += "'";
    if (!measure.empty()) {
      out += " in measure '";
      out += measure;
      out += "'";
    }
    if (!detail.empty()) {
      out += ": ";
      out += detail;
    }
    return out;
  }

  bool operator==(const ValidationIssue&) const = default;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<ValidationIssue> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<ValidationIssue>& issues() const { return issues_; }

  bool has(ValidationCode code) const {
    for (const auto& i : issues_)
      if (i.code == code) return true;
    return false;
  }

 private:
  static std::string join(const std::vector<ValidationIssue>& issues) {
    std::string out = "scenario validation failed";
    for (const auto& i : issues) {
      out += "\n  - ";
      out += i.message();
    }
    return out;
  }

  std::vector<ValidationIssue> issues_;
};

namespace detail {

inline void check_per_class_tables(const ObscurityMeasure& m,
                                   std::vector<ValidationIssue>& issues) {
  for (auto kind : kAttackerKinds) {
    const double f = m.filter_fraction(kind);
    if (!(f >= 0.0 && f <= 1.0)) {  // also rejects NaN
      issues.push_back({ValidationCode::FractionOutOfRange,
                        "filter_fractions." + std::string(to_string(kind)),
                        m.name, "must lie in [0,1]"});
    }
    const double w = m.work_factor(kind);
    if (!(w >= 1.0) || std::isinf(w)) {
      issues.push_back({ValidationCode::WorkFactorBelowOne,
                        "work_factors." + std::string(to_string(kind)),
                        m.name, "must be a finite value >= 1"});
    }
  }
}

}  // namespace detail

// Checks every type invariant and returns all violations (empty when valid).
inline std::vector<ValidationIssue> check_scenario(const Scenario& s) {
  std::vector<ValidationIssue> issues;

  for (auto kind : kAttackerKinds) {
    if (s.population.count(kind) < 0) {
      issues.push_back({ValidationCode::NegativeCount,
                        "population." + std::string(to_string(kind)) + "s", "",
                        "attack-source counts must be >= 0"});
    }
  }

  std::set<std::string_view> seen;
  for (const auto& m : s.stack.measures) {
    if (m.name.empty()) {
      issues.push_back({ValidationCode::EmptyMeasureName, "name", "",
                        "every measure needs a non-empty name"});
    } else if (!seen.insert(m.name).second) {
      issues.push_back({ValidationCode::DuplicateMeasureName, "name", m.name,
                        "measure names must be unique within a stack"});
    }
    detail::check_per_class_tables(m, issues);
  }

  if (!(s.baseline_time_hours > 0.0) || std::isinf(s.baseline_time_hours)) {
    issues.push_back({ValidationCode::NonPositiveBaseline, "baseline.time_hours",
                      "", "must be a finite value > 0"});
  }
  if (s.baseline_population < 1) {
    issues.push_back({ValidationCode::NonPositiveBaseline, "baseline.population",
                      "", "must be >= 1"});
  }

  if (!(s.risk.aro >= 0.0)) {
    issues.push_back({ValidationCode::NegativeValue, "risk.aro", "",
                      "must be >= 0"});
  }
  if (!(s.risk.av >= 0.0)) {
    issues.push_back({ValidationCode::NegativeValue, "risk.av", "",
                      "must be >= 0"});
  }
  if (!(s.risk.ef >= 0.0 && s.risk.ef <= 1.0)) {
    issues.push_back({ValidationCode::FractionOutOfRange, "risk.ef", "",
                      "must lie in [0,1]"});
  }

  if (s.fleet) {
    if (s.fleet->instances < 1) {
      issues.push_back({ValidationCode::InvalidFleet, "fleet.instances", "",
                        "must be >= 1"});
    }
    const double p = s.fleet->per_instance_compromise_probability;
    if (!(p >= 0.0 && p <= 1.0)) {
      issues.push_back({ValidationCode::FractionOutOfRange,
                        "fleet.per_instance_probability", "",
                        "must lie in [0,1]"});
    }
  }

  if (s.epoch_hours && (!(*s.epoch_hours > 0.0) || std::isinf(*s.epoch_hours))) {
    issues.push_back({ValidationCode::NonPositiveEpoch, "epoch_hours", "",
                      "must be a finite value > 0"});
  }

  return issues;
}

// Returns the scenario unchanged when every invariant holds, otherwise throws
// ValidationError carrying the full issue list. Idempotent by construction:
// validation never mutates. Per-class defaulting (fraction 0, lambda 1 for
// classes a measure does not mention) happens when a measure is built or
// parsed, so validated measures always cover all four classes.
inline Scenario validate_scenario(Scenario scenario) {
  auto issues = check_scenario(scenario);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return scenario;
}

}  // namespace obscura
