#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "obscura/threat_model.hpp"

// Closed-form valuation of an obscurity defense stack: per-class filter
// composition, residual threat, proportional time-to-compromise scaling,
// ALE, work-factor (MTBF) composition, and the exponential compromise model
// the Monte Carlo simulator is checked against.
//
// Every function here is a pure function of its arguments and assumes a
// scenario that passed validate_scenario().

namespace obscura {

// Residual threat after filtering: per-class surviving source counts, their
// sum T, and T as a fraction of the initial population.
struct ResidualThreat {
  PerClass<double> counts{};
  double total = 0.0;
  double fraction = 1.0;
};

struct AnalyticReport {
  CompositionMode mode = CompositionMode::Additive;
  ResidualThreat residual;
  double scaled_time_hours = 0.0;
  // Effective per-class work factor used by the engine: the composed product
  // for learning-capable classes, 1.0 for automated classes (declared lambdas
  // for automated classes are ignored; see work_factor_warnings).
  PerClass<double> composed_lambda{1.0, 1.0, 1.0, 1.0};
  double ale = 0.0;
  double aggregate_rate_per_hour = 0.0;
};

// Combined filter fraction for one class over the whole stack.
//
//   Additive:               min(1, sum_i f_i)
//   MultiplicativeSurvival: 1 - prod_i (1 - f_i)
//
// Contributions are folded in sorted order, so the result is bit-identical
// under any permutation of the stack.
inline double composed_filter_fraction(const DefenseStack& stack,
                                       AttackerKind kind,
                                       CompositionMode mode) {
  std::vector<double> fractions;
  fractions.reserve(stack.measures.size());
  for (const auto& m : stack.measures)
    fractions.push_back(m.filter_fraction(kind));
  std::sort(fractions.begin(), fractions.end());

  if (mode == CompositionMode::Additive) {
    double sum = 0.0;
    for (double f : fractions) sum += f;
    return std::min(1.0, sum);
  }
  double survival = 1.0;
  for (double f : fractions) survival *= (1.0 - f);
  return 1.0 - survival;
}

inline ResidualThreat residual_threat(const ThreatPopulation& population,
                                      const DefenseStack& stack,
                                      CompositionMode mode) {
  ResidualThreat out;
  for (auto kind : kAttackerKinds) {
    const double f = composed_filter_fraction(stack, kind, mode);
    const double residual =
        static_cast<double>(population.count(kind)) * (1.0 - f);
    out.counts[index_of(kind)] = residual;
    out.total += residual;
  }
  const std::int64_t initial = population.total();
  out.fraction = initial > 0 ? out.total / static_cast<double>(initial) : 1.0;
  return out;
}

// Mean time-to-compromise scales inversely with the number of surviving
// attack sources. Zero residual means the threat never arrives: +infinity.
inline double scaled_time_to_compromise(double baseline_time_hours,
                                        std::int64_t baseline_population,
                                        double residual_total) {
  if (!(residual_total > 0.0))
    return std::numeric_limits<double>::infinity();
  return baseline_time_hours * static_cast<double>(baseline_population) /
         residual_total;
}

inline double annual_loss_expectancy(const RiskParams& risk) {
  return risk.aro * (risk.av * risk.ef);
}

// Total work factor for one class. Independent measures multiply; dependent
// measures contribute only the max lambda of their group (unlabeled
// dependent measures share one anonymous group). Folds in sorted order so
// the result is permutation-invariant. Always >= 1 for validated stacks.
inline double composed_work_factor(const DefenseStack& stack,
                                   AttackerKind kind) {
  std::vector<double> factors;
  std::map<std::string, double> group_max;
  for (const auto& m : stack.measures) {
    const double w = m.work_factor(kind);
    if (m.independent) {
      factors.push_back(w);
    } else {
      const std::string key = m.group.value_or("");
      auto [it, inserted] = group_max.emplace(key, w);
      if (!inserted) it->second = std::max(it->second, w);
    }
  }
  std::sort(factors.begin(), factors.end());
  double total = 1.0;
  for (double w : factors) total *= w;
  for (const auto& [key, w] : group_max) total *= w;
  return total;
}

// An obstacle that makes flaw-finding lambda times harder cuts the
// probability of failure on the next test to 1/lambda.
inline double next_test_failure_probability(double p0, double lambda_total) {
  return p0 / lambda_total;
}

// Expected brute-force time for a random password: half-keyspace search,
// charset_size^length / (2 * guess_rate). A keyspace beyond double range
// returns +infinity rather than erroring.
inline double crack_time_seconds(std::int64_t length,
                                 std::int64_t charset_size,
                                 double guess_rate_per_second) {
  const double keyspace = std::pow(static_cast<double>(charset_size),
                                   static_cast<double>(length));
  if (std::isinf(keyspace)) return std::numeric_limits<double>::infinity();
  return keyspace / (2.0 * guess_rate_per_second);
}

// Aggregate compromise rate (Lambda, events/hour) for the exponential model.
// Each surviving source contributes the per-source rate
// lambda0 = 1 / (baseline_time_hours * baseline_population); learning-capable
// sources are slowed by their work factor. With hacker_lambda = 1 this
// reduces to residual_total * lambda0, and 1/Lambda equals
// scaled_time_to_compromise.
inline double aggregate_compromise_rate(const ResidualThreat& residual,
                                        double baseline_time_hours,
                                        std::int64_t baseline_population,
                                        double hacker_lambda) {
  const double lambda0 =
      1.0 / (baseline_time_hours * static_cast<double>(baseline_population));
  double effective_sources = 0.0;
  for (auto kind : kAttackerKinds) {
    const double r = residual.counts[index_of(kind)];
    effective_sources += is_learning_capable(kind) ? r / hacker_lambda : r;
  }
  return lambda0 * effective_sources;
}

// P(first compromise within E hours) under rate Lambda: 1 - exp(-Lambda*E).
inline double epoch_compromise_probability(double rate_per_hour,
                                           double epoch_hours) {
  return -std::expm1(-rate_per_hour * epoch_hours);
}

// Work factors only slow learning-capable classes; a lambda declared for an
// automated class is ignored. One warning line per ignored declaration.
inline std::vector<std::string> work_factor_warnings(const DefenseStack& stack) {
  std::vector<std::string> warnings;
  for (const auto& m : stack.measures) {
    for (auto kind : kAttackerKinds) {
      if (is_learning_capable(kind)) continue;
      const double w = m.work_factor(kind);
      if (w > 1.0) {
        std::ostringstream os;
        os << "measure '" << m.name << "' declares work_factor " << w
           << " for automated class '" << to_string(kind)
           << "'; automated classes are go/no-go filters, the factor is ignored";
        warnings.push_back(os.str());
      }
    }
  }
  return warnings;
}

// Full closed-form roll-up for a validated scenario.
inline AnalyticReport analyze(const Scenario& scenario) {
  AnalyticReport report;
  report.mode = scenario.composition_mode;
  report.residual = residual_threat(scenario.population, scenario.stack,
                                    scenario.composition_mode);
  report.scaled_time_hours = scaled_time_to_compromise(
      scenario.baseline_time_hours, scenario.baseline_population,
      report.residual.total);
  for (auto kind : kAttackerKinds) {
    report.composed_lambda[index_of(kind)] =
        is_learning_capable(kind) ? composed_work_factor(scenario.stack, kind)
                                  : 1.0;
  }
  report.ale = annual_loss_expectancy(scenario.risk);
  report.aggregate_rate_per_hour = aggregate_compromise_rate(
      report.residual, scenario.baseline_time_hours,
      scenario.baseline_population,
      report.composed_lambda[index_of(AttackerKind::Hacker)]);
  return report;
}

}  // namespace obscura
