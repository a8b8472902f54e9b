#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "obscura/analytic_engine.hpp"
#include "obscura/attack_simulator.hpp"

#include "test_support.hpp"

using namespace obscura;
using Catch::Matchers::WithinAbs;
using test_support::make_measure;
using test_support::make_population;

namespace {

Scenario hacker_only_scenario(double hacker_lambda) {
  Scenario s;
  s.population = make_population(0, 0, 0, 500);
  s.stack.measures.push_back(
      make_measure("handicap", {}, {1, 1, 1, hacker_lambda}));
  s.baseline_time_hours = 24.0;
  s.baseline_population = 500;
  s.risk = {1.0, 1.0, 1.0};
  return s;
}

}  // namespace

TEST_CASE("a saturated filter always filters") {
  DefenseStack stack;
  stack.measures.push_back(make_measure("wall", {1.0, 1.0, 1.0, 1.0}));
  TrialRng rng(7);
  for (int i = 0; i < 500; ++i) {
    REQUIRE_FALSE(simulate_source(AttackerKind::Bot, stack, 24.0, 1000,
                                  CompositionMode::Additive, rng)
                      .has_value());
  }
}

TEST_CASE("an unprotected source compromises at the baseline-derived mean") {
  // Per-source mean is baseline_time * baseline_population hours.
  const DefenseStack empty;
  TrialRng rng(8);
  const int n = 20000;
  double sum = 0.0;
  double sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto outcome = simulate_source(AttackerKind::Worm, empty, 2.0, 50,
                                         CompositionMode::Additive, rng);
    REQUIRE(outcome.has_value());
    sum += *outcome;
    sumsq += *outcome * *outcome;
  }
  const double mean = sum / n;
  const double sd = std::sqrt((sumsq - n * mean * mean) / (n - 1));
  const double se = sd / std::sqrt(static_cast<double>(n));
  REQUIRE_THAT(mean, WithinAbs(100.0, 3.0 * se));
}

TEST_CASE("simulated means track the analytic oracle on the worked stack") {
  const Scenario s = test_support::scaled_worked_scenario();
  const SimReport report = run_trials(s, 10000, /*master_seed=*/11);

  REQUIRE(report.first_compromise_hours.has_value());
  const auto& t = *report.first_compromise_hours;
  const double oracle = scaled_time_to_compromise(
      s.baseline_time_hours, s.baseline_population,
      residual_threat(s.population, s.stack, s.composition_mode).total);
  REQUIRE_THAT(t.mean_hours, WithinAbs(oracle, 3.0 * t.se_hours));
  REQUIRE(t.p5_hours < t.mean_hours);
  REQUIRE(t.mean_hours < t.p95_hours);

  // Filter counts: population 1000 per class, fractions .8/.8/.8/.54.
  const PerClass<double> expected = {800.0, 800.0, 800.0, 540.0};
  for (auto kind : kAttackerKinds) {
    const auto& f = report.filtered[index_of(kind)];
    REQUIRE_THAT(f.value, WithinAbs(expected[index_of(kind)], 3.0 * f.se));
  }
}

TEST_CASE("doubling the hacker work factor doubles the mean compromise time") {
  const SimReport base = run_trials(hacker_only_scenario(2.0), 6000, 21);
  const SimReport slowed = run_trials(hacker_only_scenario(4.0), 6000, 22);
  REQUIRE(base.first_compromise_hours.has_value());
  REQUIRE(slowed.first_compromise_hours.has_value());
  const auto& a = *base.first_compromise_hours;
  const auto& b = *slowed.first_compromise_hours;
  const double se =
      std::sqrt(b.se_hours * b.se_hours + 4.0 * a.se_hours * a.se_hours);
  REQUIRE_THAT(b.mean_hours, WithinAbs(2.0 * a.mean_hours, 3.0 * se));
}

TEST_CASE("zero population never compromises") {
  Scenario s = test_support::scaled_worked_scenario();
  s.population = make_population(0, 0, 0, 0);
  const SimReport report = run_trials(s, 100, 5);
  REQUIRE_FALSE(report.first_compromise_hours.has_value());
  REQUIRE(report.compromise_probability_within_horizon.value == 0.0);
  REQUIRE(report.compromise_probability_within_horizon.se == 0.0);
  for (auto kind : kAttackerKinds) {
    REQUIRE(report.filtered[index_of(kind)].value == 0.0);
  }
}

TEST_CASE("identical seeds give identical reports") {
  const Scenario s = test_support::scaled_worked_scenario();
  const SimReport a = run_trials(s, 300, 99);
  const SimReport b = run_trials(s, 300, 99);
  REQUIRE(a == b);
  const SimReport c = run_trials(s, 300, 100);
  REQUIRE_FALSE(a == c);
}

TEST_CASE("reports are invariant to the degree of parallelism") {
  const Scenario s = test_support::scaled_worked_scenario();
  SimOptions single;
  single.threads = 1;
  SimOptions quad;
  quad.threads = 4;
  REQUIRE(run_trials(s, 400, 17, single) == run_trials(s, 400, 17, quad));

  FleetConfig fleet{10, SecretMode::PerInstanceRandomized, 0.1};
  REQUIRE(simulate_fleet(fleet, 4000, 17, 1) == simulate_fleet(fleet, 4000, 17, 4));

  Scenario es = s;
  es.epoch_hours = 30.0;
  EpochOptions eo1;
  eo1.threads = 1;
  EpochOptions eo4;
  eo4.threads = 4;
  REQUIRE(simulate_epochs(es, 150.0, 500, 17, eo1) ==
          simulate_epochs(es, 150.0, 500, 17, eo4));
}

TEST_CASE("shared secrets fall fleet-wide, randomized ones fall alone") {
  const std::int64_t trials = 10000;
  FleetConfig shared{10, SecretMode::Shared, 0.1};
  const FleetReport s = simulate_fleet(shared, trials, 31);
  // Every compromise takes all 10 instances, so the mean is 10x the
  // all-compromised probability.
  REQUIRE_THAT(s.mean_compromised_instances.value,
               WithinAbs(10.0 * s.probability_all_compromised.value, 1e-9));
  REQUIRE_THAT(s.probability_all_compromised.value,
               WithinAbs(0.1, 3.0 * s.probability_all_compromised.se));

  FleetConfig randomized{10, SecretMode::PerInstanceRandomized, 0.1};
  const FleetReport r = simulate_fleet(randomized, trials, 32);
  // Binomial oracle: mean = M * p = 1.0.
  REQUIRE_THAT(r.mean_compromised_instances.value,
               WithinAbs(1.0, 3.0 * r.mean_compromised_instances.se));
  // Analytic all-compromised probability is 1e-10; no trial should hit it.
  REQUIRE(r.probability_all_compromised.value == 0.0);
}

TEST_CASE("single-instance fleets make the modes coincide") {
  FleetConfig shared{1, SecretMode::Shared, 0.37};
  FleetConfig randomized{1, SecretMode::PerInstanceRandomized, 0.37};
  const FleetReport a = simulate_fleet(shared, 5000, 41);
  const FleetReport b = simulate_fleet(randomized, 5000, 41);
  // Identical draw sequences, so the statistics agree exactly.
  REQUIRE(a.mean_compromised_instances == b.mean_compromised_instances);
  REQUIRE(a.probability_all_compromised == b.probability_all_compromised);
}

TEST_CASE("property: shared secrets are never safer than randomized ones") {
  TrialRng rng(52);
  for (int i = 0; i < 25; ++i) {
    const double p = rng.uniform01();
    const auto m = 2 + static_cast<std::int64_t>(rng.uniform01() * 14);
    const std::int64_t trials = 1500;
    const FleetReport s = simulate_fleet(
        FleetConfig{m, SecretMode::Shared, p}, trials,
        static_cast<std::uint64_t>(1000 + i));
    const FleetReport r = simulate_fleet(
        FleetConfig{m, SecretMode::PerInstanceRandomized, p}, trials,
        static_cast<std::uint64_t>(2000 + i));
    const double band = 3.0 * std::sqrt(s.probability_all_compromised.se *
                                            s.probability_all_compromised.se +
                                        r.probability_all_compromised.se *
                                            r.probability_all_compromised.se);
    REQUIRE(s.probability_all_compromised.value >=
            r.probability_all_compromised.value - band);
  }
}

namespace {

// 400 unfiltered sources at 24 h baseline over 400 => Lambda = 1/24 per hour.
Scenario epoch_scenario(double epoch_hours) {
  Scenario s;
  s.population = make_population(100, 100, 100, 100);
  s.baseline_time_hours = 24.0;
  s.baseline_population = 400;
  s.risk = {1.0, 1.0, 1.0};
  s.epoch_hours = epoch_hours;
  return s;
}

}  // namespace

TEST_CASE("epoch simulation requires an epoch length") {
  Scenario s = epoch_scenario(24.0);
  s.epoch_hours.reset();
  REQUIRE_THROWS_AS(simulate_epochs(s, 100.0, 10, 1), std::invalid_argument);
}

TEST_CASE("zero horizon gives an empty epoch report") {
  const EpochReport r = simulate_epochs(epoch_scenario(24.0), 0.0, 200, 3);
  REQUIRE(r.full_epochs_entered == 0);
  REQUIRE_FALSE(r.per_epoch_compromise_probability.has_value());
  REQUIRE(r.mean_epochs_survived.value == 0.0);
  REQUIRE(r.horizon_compromise_probability.value == 0.0);
}

TEST_CASE("an empty population survives any number of epochs") {
  Scenario s = epoch_scenario(1.0);
  s.population = make_population(0, 0, 0, 0);
  const EpochReport r = simulate_epochs(s, 1e9, 50, 3);
  REQUIRE(r.full_epochs_entered == 50'000'000'000LL);
  REQUIRE(r.per_epoch_compromise_probability->value == 0.0);
  REQUIRE(r.horizon_compromise_probability.value == 0.0);
  REQUIRE(r.mean_epochs_survived.value == 1e9);

  REQUIRE_THROWS_AS(
      simulate_epochs(s, std::numeric_limits<double>::infinity(), 10, 3),
      std::invalid_argument);
}

TEST_CASE("per-epoch compromise probability matches the exponential oracle") {
  const double lambda = 1.0 / 24.0;
  for (const double epoch : {24.0 * std::log(2.0), 6.0, 48.0}) {
    const Scenario s = epoch_scenario(epoch);
    const EpochReport r = simulate_epochs(s, 8.0 * epoch, 3000, 61);
    REQUIRE(r.per_epoch_compromise_probability.has_value());
    const auto& p = *r.per_epoch_compromise_probability;
    const double oracle = epoch_compromise_probability(lambda, epoch);
    REQUIRE_THAT(p.value, WithinAbs(oracle, 3.0 * p.se));
  }
}

TEST_CASE("memorylessness: splitting a horizon into epochs changes nothing") {
  const double horizon = 16.0;
  const EpochReport split =
      simulate_epochs(epoch_scenario(horizon / 2.0), horizon, 4000, 71);
  const EpochReport single =
      simulate_epochs(epoch_scenario(horizon / 2.0), horizon / 2.0, 4000, 72);
  REQUIRE(split.per_epoch_compromise_probability.has_value());
  REQUIRE(single.per_epoch_compromise_probability.has_value());
  const auto& a = *split.per_epoch_compromise_probability;
  const auto& b = *single.per_epoch_compromise_probability;
  const double band = 3.0 * std::sqrt(a.se * a.se + b.se * b.se);
  REQUIRE_THAT(a.value, WithinAbs(b.value, band));
}

TEST_CASE("an epoch longer than the horizon reduces to a plain run") {
  Scenario s = epoch_scenario(50.0);
  const double horizon = 30.0;
  const EpochReport er = simulate_epochs(s, horizon, 2000, 81);
  SimOptions options;
  options.horizon_hours = horizon;
  const SimReport sr = run_trials(s, 2000, 81, options);
  // Same seed, same per-source draw order: the horizon probabilities agree
  // exactly, not merely statistically.
  REQUIRE(er.horizon_compromise_probability ==
          sr.compromise_probability_within_horizon);
  REQUIRE(er.full_epochs_entered == 0);
}

TEST_CASE("retention zero keeps attacker progress across boundaries") {
  // With no knowledge reset the moving target never moves: splitting the
  // horizon into epochs must reproduce the plain-run horizon probability.
  Scenario s = epoch_scenario(10.0);
  EpochOptions keep;
  keep.knowledge_reset = 0.0;
  const EpochReport er = simulate_epochs(s, 40.0, 3000, 91, keep);
  SimOptions options;
  options.horizon_hours = 40.0;
  const SimReport sr = run_trials(s, 3000, 92, options);
  const double band =
      3.0 * std::sqrt(er.horizon_compromise_probability.se *
                          er.horizon_compromise_probability.se +
                      sr.compromise_probability_within_horizon.se *
                          sr.compromise_probability_within_horizon.se);
  REQUIRE_THAT(er.horizon_compromise_probability.value,
               WithinAbs(sr.compromise_probability_within_horizon.value, band));
}

TEST_CASE("property: per-class filter counts agree with the composed fraction") {
  TrialRng rng(53);
  for (int i = 0; i < 10; ++i) {
    Scenario s;
    s.population = make_population(
        50 + static_cast<std::int64_t>(rng.uniform01() * 400),
        50 + static_cast<std::int64_t>(rng.uniform01() * 400),
        50 + static_cast<std::int64_t>(rng.uniform01() * 400),
        50 + static_cast<std::int64_t>(rng.uniform01() * 400));
    s.stack = test_support::random_stack(rng);
    s.baseline_time_hours = 24.0;
    s.baseline_population = 1000;
    const SimReport report =
        run_trials(s, 1500, static_cast<std::uint64_t>(3000 + i));
    for (auto kind : kAttackerKinds) {
      const double expected =
          static_cast<double>(s.population.count(kind)) *
          composed_filter_fraction(s.stack, kind, s.composition_mode);
      const auto& f = report.filtered[index_of(kind)];
      // 4-SE band: ~40 fixed-seed comparisons run here, and a model error
      // would miss by far more.
      REQUIRE_THAT(f.value, WithinAbs(expected, 4.0 * f.se + 1e-9));
    }
  }
}
