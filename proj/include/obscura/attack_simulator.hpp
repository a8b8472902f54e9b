#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "obscura/analytic_engine.hpp"
#include "obscura/rng.hpp"
#include "obscura/threat_model.hpp"

// Monte Carlo attacker-population simulator.
//
// Model: filtering is decided once per source (a-priori capability). An
// unfiltered source compromises after an exponential time with per-source
// rate lambda0 = 1 / (baseline_time_hours * baseline_population);
// learning-capable sources are slowed by their composed work factor
// (rate lambda0 / lambda_total). The minimum over sources is the trial's
// first-compromise time, so simulated means converge to the analytic
// engine's scaled_time_to_compromise and aggregate_compromise_rate.
//
// Determinism contract: identical (scenario, trials, master_seed) give a
// byte-identical report on the same build regardless of thread count. Trials
// draw from private streams keyed by (master_seed, trial_index), land in a
// trial-indexed buffer, and are reduced in one sequential pass.

namespace obscura {

struct AttackerAgent {
  AttackerKind kind = AttackerKind::Worm;
  bool filtered = false;
  double work_multiplier = 1.0;      // composed lambda; 1 for automated kinds
  double progress_clock_hours = 0.0; // effort spent toward the current goal
  double goal_hours = 0.0;           // effort at which the current goal falls
};

struct SummaryStat {
  double value = 0.0;
  double se = 0.0;

  bool operator==(const SummaryStat&) const = default;
};

struct CompromiseTimeStats {
  std::int64_t samples = 0;  // trials that saw a compromise
  double mean_hours = 0.0;
  double se_hours = 0.0;
  double p5_hours = 0.0;
  double p95_hours = 0.0;

  bool operator==(const CompromiseTimeStats&) const = default;
};

struct SimOptions {
  double horizon_hours = std::numeric_limits<double>::infinity();
  int threads = 0;  // 0 = hardware concurrency
};

struct SimReport {
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  CompositionMode mode = CompositionMode::Additive;
  double horizon_hours = std::numeric_limits<double>::infinity();
  // Mean sources filtered per class; SE is sample-sd / sqrt(trials).
  PerClass<SummaryStat> filtered{};
  // Statistics over trials that saw a compromise, absent when none did.
  std::optional<CompromiseTimeStats> first_compromise_hours;
  SummaryStat compromise_probability_within_horizon;

  bool operator==(const SimReport&) const = default;
};

struct FleetReport {
  std::int64_t instances = 0;
  SecretMode secret_mode = SecretMode::Shared;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  SummaryStat mean_compromised_instances;
  SummaryStat probability_all_compromised;

  bool operator==(const FleetReport&) const = default;
};

struct EpochOptions {
  // Probability that a regeneration invalidates a surviving attacker's
  // progress (its remaining time is re-drawn). 1 = full reset, 0 = the
  // attacker keeps its remaining time across boundaries.
  double knowledge_reset = 1.0;
  int threads = 0;
};

struct EpochReport {
  double epoch_hours = 0.0;
  double horizon_hours = 0.0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  double knowledge_reset = 1.0;
  std::int64_t full_epochs_entered = 0;
  // Pooled over full-length epochs entered; absent when none were
  // (horizon 0, or epoch longer than the horizon).
  std::optional<SummaryStat> per_epoch_compromise_probability;
  // Full-length epochs completed before the first compromise.
  SummaryStat mean_epochs_survived;
  SummaryStat horizon_compromise_probability;

  bool operator==(const EpochReport&) const = default;
};

namespace detail {

inline int effective_threads(int requested, std::int64_t trials) {
  int n = requested > 0
              ? requested
              : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (static_cast<std::int64_t>(n) > trials) n = static_cast<int>(std::max<std::int64_t>(trials, 1));
  return n;
}

// Runs fn(trial_index) for every trial, split into contiguous chunks across
// threads. fn must only write to trial-indexed storage.
template <typename Fn>
void for_each_trial(std::int64_t trials, int threads, Fn&& fn) {
  const int n = effective_threads(threads, trials);
  if (n <= 1) {
    for (std::int64_t i = 0; i < trials; ++i) fn(i);
    return;
  }
  const std::int64_t chunk = (trials + n - 1) / n;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    const std::int64_t begin = static_cast<std::int64_t>(t) * chunk;
    const std::int64_t end = std::min(trials, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (std::int64_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline SummaryStat mean_and_se(const std::vector<double>& xs) {
  SummaryStat out;
  const auto n = static_cast<std::int64_t>(xs.size());
  if (n == 0) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.value = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double x : xs) {
      const double d = x - out.value;
      ss += d * d;
    }
    out.se = std::sqrt(ss / static_cast<double>(n - 1)) /
             std::sqrt(static_cast<double>(n));
  }
  return out;
}

inline SummaryStat proportion_and_se(std::int64_t hits, std::int64_t n) {
  SummaryStat out;
  if (n <= 0) return out;
  out.value = static_cast<double>(hits) / static_cast<double>(n);
  out.se = std::sqrt(out.value * (1.0 - out.value) / static_cast<double>(n));
  return out;
}

// Linear interpolation between closest ranks; xs must be sorted.
inline double percentile(const std::vector<double>& xs, double q) {
  if (xs.empty()) return 0.0;
  if (xs.size() == 1) return xs.front();
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return xs[lo] + frac * (xs[hi] - xs[lo]);
}

// Per-class parameters shared by the simulators.
struct ClassParams {
  std::int64_t count = 0;
  double filter_fraction = 0.0;
  double rate_per_hour = 0.0;
};

inline PerClass<ClassParams> class_params(const Scenario& scenario) {
  const double lambda0 =
      1.0 / (scenario.baseline_time_hours *
             static_cast<double>(scenario.baseline_population));
  PerClass<ClassParams> params{};
  for (auto kind : kAttackerKinds) {
    ClassParams p;
    p.count = scenario.population.count(kind);
    p.filter_fraction = composed_filter_fraction(scenario.stack, kind,
                                                 scenario.composition_mode);
    p.rate_per_hour =
        is_learning_capable(kind)
            ? lambda0 / composed_work_factor(scenario.stack, kind)
            : lambda0;
    params[index_of(kind)] = p;
  }
  return params;
}

inline std::optional<double> draw_source(const ClassParams& p, TrialRng& rng) {
  if (rng.bernoulli(p.filter_fraction)) return std::nullopt;
  return rng.exponential(p.rate_per_hour);
}

}  // namespace detail

// One source against the stack: nullopt when filtered, otherwise the hours
// until this source compromises the system.
inline std::optional<double> simulate_source(AttackerKind kind,
                                             const DefenseStack& stack,
                                             double baseline_time_hours,
                                             std::int64_t baseline_population,
                                             CompositionMode mode,
                                             TrialRng& rng) {
  const double lambda0 =
      1.0 / (baseline_time_hours * static_cast<double>(baseline_population));
  detail::ClassParams p;
  p.filter_fraction = composed_filter_fraction(stack, kind, mode);
  p.rate_per_hour = is_learning_capable(kind)
                        ? lambda0 / composed_work_factor(stack, kind)
                        : lambda0;
  return detail::draw_source(p, rng);
}

inline SimReport run_trials(const Scenario& scenario, std::int64_t trials,
                            std::uint64_t master_seed,
                            const SimOptions& options = {}) {
  if (trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");

  const auto params = detail::class_params(scenario);

  struct TrialRecord {
    double first_hours = std::numeric_limits<double>::infinity();
    PerClass<std::int64_t> filtered{};
  };
  std::vector<TrialRecord> records(static_cast<std::size_t>(trials));

  detail::for_each_trial(trials, options.threads, [&](std::int64_t i) {
    TrialRng rng(master_seed, static_cast<std::uint64_t>(i));
    TrialRecord rec;
    for (auto kind : kAttackerKinds) {
      const auto& p = params[index_of(kind)];
      for (std::int64_t s = 0; s < p.count; ++s) {
        if (auto hours = detail::draw_source(p, rng)) {
          rec.first_hours = std::min(rec.first_hours, *hours);
        } else {
          ++rec.filtered[index_of(kind)];
        }
      }
    }
    records[static_cast<std::size_t>(i)] = rec;
  });

  SimReport report;
  report.trials = trials;
  report.seed = master_seed;
  report.mode = scenario.composition_mode;
  report.horizon_hours = options.horizon_hours;

  std::vector<double> scratch(static_cast<std::size_t>(trials));
  for (auto kind : kAttackerKinds) {
    for (std::int64_t i = 0; i < trials; ++i)
      scratch[static_cast<std::size_t>(i)] = static_cast<double>(
          records[static_cast<std::size_t>(i)].filtered[index_of(kind)]);
    report.filtered[index_of(kind)] = detail::mean_and_se(scratch);
  }

  std::vector<double> times;
  times.reserve(records.size());
  std::int64_t within_horizon = 0;
  for (const auto& rec : records) {
    if (std::isinf(rec.first_hours)) continue;
    times.push_back(rec.first_hours);
    if (rec.first_hours <= options.horizon_hours) ++within_horizon;
  }
  report.compromise_probability_within_horizon =
      detail::proportion_and_se(within_horizon, trials);

  if (!times.empty()) {
    CompromiseTimeStats stats;
    stats.samples = static_cast<std::int64_t>(times.size());
    const auto ms = detail::mean_and_se(times);
    stats.mean_hours = ms.value;
    stats.se_hours = ms.se;
    std::sort(times.begin(), times.end());
    stats.p5_hours = detail::percentile(times, 0.05);
    stats.p95_hours = detail::percentile(times, 0.95);
    report.first_compromise_hours = stats;
  }
  return report;
}

// Break-once-break-everywhere comparison. Shared mode draws one compromise
// event per trial and, when it hits, every instance falls; per-instance
// randomization draws independently per instance.
inline FleetReport simulate_fleet(const FleetConfig& fleet, std::int64_t trials,
                                  std::uint64_t master_seed, int threads = 0) {
  if (trials < 1)
    throw std::invalid_argument("simulate_fleet: trials must be >= 1");

  std::vector<std::int64_t> compromised(static_cast<std::size_t>(trials));
  const double p = fleet.per_instance_compromise_probability;
  const std::int64_t m = fleet.instances;

  detail::for_each_trial(trials, threads, [&](std::int64_t i) {
    TrialRng rng(master_seed, static_cast<std::uint64_t>(i));
    std::int64_t hit = 0;
    if (fleet.secret_mode == SecretMode::Shared) {
      hit = rng.bernoulli(p) ? m : 0;
    } else {
      for (std::int64_t k = 0; k < m; ++k)
        if (rng.bernoulli(p)) ++hit;
    }
    compromised[static_cast<std::size_t>(i)] = hit;
  });

  FleetReport report;
  report.instances = m;
  report.secret_mode = fleet.secret_mode;
  report.trials = trials;
  report.seed = master_seed;

  std::vector<double> xs(compromised.begin(), compromised.end());
  report.mean_compromised_instances = detail::mean_and_se(xs);
  std::int64_t all = 0;
  for (auto c : compromised)
    if (c == m) ++all;
  report.probability_all_compromised = detail::proportion_and_se(all, trials);
  return report;
}

// Moving-target dynamics: the scenario runs in epochs of epoch_hours; at
// each boundary every surviving unfiltered attacker's progress is
// invalidated with probability knowledge_reset (its remaining time is
// re-drawn). A trial ends at its first compromise. The per-epoch compromise
// probability is pooled over full-length epochs only; a final epoch
// truncated by the horizon contributes to horizon_compromise_probability
// but not to the pooled per-epoch hazard.
inline EpochReport simulate_epochs(const Scenario& scenario,
                                   double horizon_hours, std::int64_t trials,
                                   std::uint64_t master_seed,
                                   const EpochOptions& options = {}) {
  if (!scenario.epoch_hours)
    throw std::invalid_argument(
        "MissingEpochLength: scenario has no epoch_hours");
  if (trials < 1)
    throw std::invalid_argument("simulate_epochs: trials must be >= 1");
  if (!(horizon_hours >= 0.0) || std::isinf(horizon_hours))
    throw std::invalid_argument(
        "simulate_epochs: horizon must be finite and >= 0");

  const double epoch = *scenario.epoch_hours;
  const auto full_epochs = static_cast<std::int64_t>(horizon_hours / epoch);
  const double remainder = horizon_hours - static_cast<double>(full_epochs) * epoch;
  const auto params = detail::class_params(scenario);
  PerClass<double> lambdas{1.0, 1.0, 1.0, 1.0};
  for (auto kind : kAttackerKinds) {
    if (is_learning_capable(kind))
      lambdas[index_of(kind)] = composed_work_factor(scenario.stack, kind);
  }

  struct TrialRecord {
    std::int64_t full_entered = 0;
    std::int64_t full_compromised = 0;  // 0 or 1
    std::int64_t survived = 0;          // full epochs before first compromise
    bool compromised = false;
  };
  std::vector<TrialRecord> records(static_cast<std::size_t>(trials));

  detail::for_each_trial(trials, options.threads, [&](std::int64_t i) {
    TrialRng rng(master_seed, static_cast<std::uint64_t>(i));

    // Filtering is a property of the source, rolled once per trial; only
    // unfiltered agents are tracked. Draw order matches run_trials.
    std::vector<AttackerAgent> agents;
    for (auto kind : kAttackerKinds) {
      const auto& p = params[index_of(kind)];
      for (std::int64_t s = 0; s < p.count; ++s) {
        if (auto hours = detail::draw_source(p, rng)) {
          AttackerAgent agent;
          agent.kind = kind;
          agent.work_multiplier = lambdas[index_of(kind)];
          agent.goal_hours = *hours;
          agents.push_back(agent);
        }
      }
    }

    TrialRecord rec;
    const std::int64_t total_epochs = full_epochs + (remainder > 0.0 ? 1 : 0);
    if (agents.empty()) {  // nothing left to simulate epoch by epoch
      rec.full_entered = full_epochs;
      rec.survived = full_epochs;
      records[static_cast<std::size_t>(i)] = rec;
      return;
    }
    for (std::int64_t e = 0; e < total_epochs; ++e) {
      const bool full = e < full_epochs;
      const double len = full ? epoch : remainder;
      if (full) ++rec.full_entered;

      double min_remaining = std::numeric_limits<double>::infinity();
      for (const auto& a : agents)
        min_remaining =
            std::min(min_remaining, a.goal_hours - a.progress_clock_hours);

      if (min_remaining <= len) {
        rec.compromised = true;
        if (full) rec.full_compromised = 1;
        rec.survived = full ? e : full_epochs;
        break;
      }
      rec.survived = full ? e + 1 : full_epochs;

      if (e + 1 < total_epochs) {  // regeneration boundary
        for (auto& a : agents) {
          if (rng.bernoulli(options.knowledge_reset)) {
            // The regenerated instance moved the flaw this agent was
            // converging on: fresh goal, progress lost.
            a.goal_hours =
                rng.exponential(params[index_of(a.kind)].rate_per_hour);
            a.progress_clock_hours = 0.0;
          } else {
            a.progress_clock_hours += len;
          }
        }
      }
    }
    records[static_cast<std::size_t>(i)] = rec;
  });

  EpochReport report;
  report.epoch_hours = epoch;
  report.horizon_hours = horizon_hours;
  report.trials = trials;
  report.seed = master_seed;
  report.knowledge_reset = options.knowledge_reset;

  std::int64_t entered = 0;
  std::int64_t compromised_full = 0;
  std::int64_t compromised_any = 0;
  std::vector<double> survived(static_cast<std::size_t>(trials));
  for (std::int64_t i = 0; i < trials; ++i) {
    const auto& rec = records[static_cast<std::size_t>(i)];
    entered += rec.full_entered;
    compromised_full += rec.full_compromised;
    if (rec.compromised) ++compromised_any;
    survived[static_cast<std::size_t>(i)] = static_cast<double>(rec.survived);
  }
  report.full_epochs_entered = entered;
  if (entered > 0) {
    report.per_epoch_compromise_probability =
        detail::proportion_and_se(compromised_full, entered);
  }
  report.mean_epochs_survived = detail::mean_and_se(survived);
  report.horizon_compromise_probability =
      detail::proportion_and_se(compromised_any, trials);
  return report;
}

}  // namespace obscura
