#pragma once

#include "ramdp/environments.hpp"
#include "ramdp/explore.hpp"
#include "ramdp/learners.hpp"
#include "ramdp/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ramdp {

struct SwitchingSetup {
    std::string environment_b;
    std::int64_t switch_after = 0; // started-trajectory count
};

struct ExperimentConfig {
    std::string environment;
    std::vector<LearnerConfig> learners;
    std::int64_t trajectory_budget = 1000; // K
    int horizon = 0;                       // 0: defaults to 10 * |S|
    int repetitions = 100;
    std::uint64_t base_seed = 1;
    double xi = 1.0;
    std::optional<SwitchingSetup> switching;
    double tolerance = 1e-6;
    int workers = 0; // 0: resolved by the CLI (RAMDP_WORKERS or 1)
    bool timing = true;
    bool doubling_on_transitions = false;
    bool uniform_exploration = false;
    std::string data_dir; // empty: default_data_dir()
};

struct ExperimentRecord {
    int repetition = 0;
    std::string learner;
    int iteration = 0; // 0 is the prior snapshot
    std::int64_t trajectories = 0;
    double perf_true = 0.0;
    double perf_model = 0.0;
    double est_error = 0.0;
    double model_error = 0.0;
    double wall_ms = 0.0;
};

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Value of the robust policy on the true MDP at the initial state.
double metric_performance(const Mdp& true_mdp, const Policy& robust_policy,
                          const Specification& spec);

/// Worst-case model value minus true performance; at or below zero means the
/// model's promise is conservative.
double metric_estimation_error(double performance_model, double performance_true);

/// Mean over non-point supported transitions of the distance between the true
/// probability and the learned interval (max over both bounds) or point
/// estimate.
double metric_model_error(const Mdp& true_mdp, const LearnedModel& learned);

// ---------------------------------------------------------------------------
// Experiment loop
// ---------------------------------------------------------------------------

/// One seeded repetition of the anytime loop: snapshot the prior, then
/// alternate exploration, learner update and metric snapshot until the
/// trajectory budget is consumed. Fully determined by (config, seed).
std::vector<ExperimentRecord> run_repetition(const ExperimentConfig& config,
                                             const LearnerConfig& learner, int repetition);

struct ExperimentResult {
    std::vector<ExperimentRecord> records;
    std::vector<std::string> failures; // per failed repetition, excluded above
};

/// All learners x repetitions, parallel up to config.workers. Record order is
/// deterministic regardless of the worker count.
ExperimentResult run_experiment(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Aggregation and CSV output
// ---------------------------------------------------------------------------

struct AggregateRow {
    std::string learner;
    std::int64_t trajectories = 0;
    // mean, ci_lo, ci_hi per metric
    double perf_true[3], perf_model[3], est_error[3], model_error[3];
};

/// Aligns repetitions of each learner on the union grid of cumulative
/// trajectory counts (last observation carried forward) and reports the mean
/// with a normal-approximation 95% confidence interval. Requires at least two
/// repetitions.
std::vector<AggregateRow> aggregate(const std::vector<ExperimentRecord>& records);

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

} // namespace ramdp
