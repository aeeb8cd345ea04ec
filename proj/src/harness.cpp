#include "ramdp/harness.hpp"

#include "ramdp/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>

namespace ramdp {

double metric_performance(const Mdp& true_mdp, const Policy& robust_policy,
                          const Specification& spec) {
    return evaluate_policy(true_mdp, robust_policy, spec.with_semantics(Semantics::Exact));
}

double metric_estimation_error(double performance_model, double performance_true) {
    return performance_model - performance_true;
}

namespace {

template <typename Learned>
double model_error_impl(const Mdp& true_mdp, const Learned& learned) {
    double sum = 0.0;
    std::int64_t count = 0;
    for (int p = 0; p < true_mdp.pair_count(); ++p) {
        if (true_mdp.succ_begin[p + 1] - true_mdp.succ_begin[p] == 1)
            continue; // immutable [1,1] transition
        for (int t = true_mdp.succ_begin[p]; t < true_mdp.succ_begin[p + 1]; ++t) {
            const double truth = true_mdp.succ_prob[t];
            if constexpr (std::is_same_v<Learned, UncertainMdp>) {
                sum += std::max(std::abs(truth - learned.succ_lo[t]),
                                std::abs(truth - learned.succ_hi[t]));
            } else {
                sum += std::abs(truth - learned.succ_prob[t]);
            }
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

} // namespace

double metric_model_error(const Mdp& true_mdp, const LearnedModel& learned) {
    if (const UncertainMdp* umdp = as_umdp(learned)) {
        if (!same_support(true_mdp, *umdp))
            throw std::invalid_argument("metric_model_error: support mismatch");
        return model_error_impl(true_mdp, *umdp);
    }
    const Mdp* mdp = as_mdp(learned);
    if (!same_support(true_mdp, *mdp))
        throw std::invalid_argument("metric_model_error: support mismatch");
    return model_error_impl(true_mdp, *mdp);
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

struct Snapshot {
    double perf_true, perf_model, model_error;
};

// Robust policy + worst-case value on the learned model, evaluated against the
// current true environment.
Snapshot take_snapshot(const LearnedModel& model, const Mdp& current_true,
                       const Specification& spec, const SolveOptions& options) {
    SolveResult result;
    if (const UncertainMdp* umdp = as_umdp(model))
        result = robust_value_iteration(*umdp, spec.with_semantics(Semantics::Pessimistic),
                                        options);
    else
        result = exact_value_iteration(*as_mdp(model), spec.with_semantics(Semantics::Exact),
                                       options);

    Snapshot snap;
    snap.perf_model = result.values[current_true.initial_state];
    snap.perf_true = metric_performance(current_true, result.policy, spec);
    snap.model_error = metric_model_error(current_true, model);
    return snap;
}

Policy exploration_policy(const LearnedModel& model, const Specification& spec,
                          const SolveOptions& options) {
    if (const UncertainMdp* umdp = as_umdp(model))
        return optimistic_policy(*umdp, spec, options);
    return exact_value_iteration(*as_mdp(model), spec.with_semantics(Semantics::Exact), options)
        .policy;
}

struct PreparedExperiment {
    Environment env;
    std::optional<Mdp> env_b;
    std::int64_t switch_after = 0;
    int horizon = 0;
};

PreparedExperiment prepare(const ExperimentConfig& config) {
    PreparedExperiment prep;
    prep.env = make_environment(config.environment, config.data_dir);
    if (config.switching) {
        Environment b = make_environment(config.switching->environment_b, config.data_dir);
        if (!same_support(prep.env.mdp, b.mdp))
            throw std::invalid_argument(
                "switching environment must share the support of the base environment");
        prep.env_b = std::move(b.mdp);
        prep.switch_after = config.switching->switch_after;
    }
    prep.horizon = config.horizon > 0 ? config.horizon : 10 * prep.env.mdp.num_states;
    return prep;
}

std::vector<ExperimentRecord> run_repetition_impl(const ExperimentConfig& config,
                                                  const PreparedExperiment& prep,
                                                  const LearnerConfig& learner,
                                                  int repetition) {
    const Mdp& graph = prep.env.mdp;
    const Specification& spec = prep.env.spec;
    const SolveOptions options{config.tolerance, 100000};

    Rng rng = Rng::for_repetition(config.base_seed, static_cast<std::uint64_t>(repetition));
    std::unique_ptr<SamplingOracle> oracle;
    if (prep.env_b)
        oracle = std::make_unique<SwitchingOracle>(graph, *prep.env_b, prep.switch_after);
    else
        oracle = std::make_unique<FixedOracle>(graph);

    const StateClassification classification = classify_states(graph, spec);
    LearnerState state = make_learner_state(learner, graph);
    LearnedModel model = prior_model(learner, state);
    ScheduleState schedule(graph);

    auto current_true = [&]() -> const Mdp& { return oracle->current_mdp(); };

    std::vector<ExperimentRecord> records;
    auto emit = [&](int iteration, double wall_ms) {
        const auto t0 = Clock::now();
        const Snapshot snap = take_snapshot(model, current_true(), spec, options);
        const double snap_ms = ms_between(t0, Clock::now());
        ExperimentRecord record;
        record.repetition = repetition;
        record.learner = learner.name.empty() ? method_name(learner.method) : learner.name;
        record.iteration = iteration;
        record.trajectories = schedule.trajectories_done;
        record.perf_true = snap.perf_true;
        record.perf_model = snap.perf_model;
        record.est_error = metric_estimation_error(snap.perf_model, snap.perf_true);
        record.model_error = snap.model_error;
        record.wall_ms = config.timing ? wall_ms + snap_ms : 0.0;
        records.push_back(std::move(record));
    };

    emit(0, 0.0);
    int iteration = 0;
    while (schedule.trajectories_done < config.trajectory_budget) {
        auto t0 = Clock::now();
        Policy exploration = config.uniform_exploration
                                 ? uniform_policy(graph)
                                 : exploration_policy(model, spec, options);
        if (config.xi < 1.0 && exploration.deterministic)
            exploration = randomize_policy(graph, exploration, config.xi);
        double wall_ms = ms_between(t0, Clock::now());

        const CountTable counts = run_iteration(
            schedule, *oracle, exploration, spec, classification, prep.horizon,
            config.trajectory_budget - schedule.trajectories_done, rng,
            config.doubling_on_transitions);

        t0 = Clock::now();
        model = learner_step(learner, state, counts, schedule.global.total_steps());
        wall_ms += ms_between(t0, Clock::now());
        emit(++iteration, wall_ms);
    }
    return records;
}

} // namespace

std::vector<ExperimentRecord> run_repetition(const ExperimentConfig& config,
                                             const LearnerConfig& learner, int repetition) {
    return run_repetition_impl(config, prepare(config), learner, repetition);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    if (config.repetitions < 1)
        throw std::invalid_argument("run_experiment: need at least one repetition");
    for (const auto& learner : config.learners)
        learner.validate();
    if (config.learners.empty())
        throw std::invalid_argument("run_experiment: no learners configured");

    const PreparedExperiment prep = prepare(config);

    struct Task {
        int learner_index;
        int repetition;
    };
    std::vector<Task> tasks;
    for (int l = 0; l < static_cast<int>(config.learners.size()); ++l)
        for (int r = 0; r < config.repetitions; ++r)
            tasks.push_back({l, r});

    std::vector<std::vector<ExperimentRecord>> per_task(tasks.size());
    std::vector<std::string> failures(tasks.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size())
                return;
            const Task& task = tasks[i];
            const LearnerConfig& learner = config.learners[task.learner_index];
            try {
                per_task[i] = run_repetition_impl(config, prep, learner, task.repetition);
            } catch (const std::exception& e) {
                const std::string name =
                    learner.name.empty() ? method_name(learner.method) : learner.name;
                failures[i] = name + " repetition " + std::to_string(task.repetition) + ": " +
                              e.what();
            }
        }
    };

    const int workers = std::max(1, std::min<int>(config.workers,
                                                  static_cast<int>(tasks.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(worker);
        for (auto& thread : pool)
            thread.join();
    }

    ExperimentResult result;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!failures[i].empty()) {
            result.failures.push_back(failures[i]);
            continue;
        }
        result.records.insert(result.records.end(), per_task[i].begin(), per_task[i].end());
    }
    return result;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

std::vector<AggregateRow> aggregate(const std::vector<ExperimentRecord>& records) {
    // learner -> repetition -> (trajectories -> record), plus the union grid.
    std::map<std::string, std::map<int, std::map<std::int64_t, const ExperimentRecord*>>> series;
    std::map<std::string, std::set<std::int64_t>> grids;
    std::vector<std::string> learner_order;
    for (const auto& record : records) {
        if (!series.count(record.learner))
            learner_order.push_back(record.learner);
        series[record.learner][record.repetition][record.trajectories] = &record;
        grids[record.learner].insert(record.trajectories);
    }

    std::vector<AggregateRow> rows;
    for (const auto& learner : learner_order) {
        const auto& reps = series[learner];
        if (reps.size() < 2)
            throw std::invalid_argument("aggregate: need at least 2 repetitions for " + learner);
        for (const std::int64_t grid_point : grids[learner]) {
            // Last observation carried forward per repetition.
            std::vector<const ExperimentRecord*> sample;
            for (const auto& [rep, by_traj] : reps) {
                (void)rep;
                auto it = by_traj.upper_bound(grid_point);
                if (it == by_traj.begin())
                    continue; // repetition starts later (cannot happen: prior is at 0)
                sample.push_back(std::prev(it)->second);
            }
            if (sample.size() < 2)
                continue;

            AggregateRow row;
            row.learner = learner;
            row.trajectories = grid_point;
            auto fill = [&](double (ExperimentRecord::*field), double out[3]) {
                const double n = static_cast<double>(sample.size());
                double mean = 0.0;
                for (const auto* record : sample)
                    mean += record->*field;
                mean /= n;
                double var = 0.0;
                for (const auto* record : sample)
                    var += (record->*field - mean) * (record->*field - mean);
                var /= (n - 1.0);
                const double half = 1.96 * std::sqrt(var / n);
                out[0] = mean;
                out[1] = mean - half;
                out[2] = mean + half;
            };
            fill(&ExperimentRecord::perf_true, row.perf_true);
            fill(&ExperimentRecord::perf_model, row.perf_model);
            fill(&ExperimentRecord::est_error, row.est_error);
            fill(&ExperimentRecord::model_error, row.model_error);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// CSV output (RFC 4180 quoting, 10 significant digits)
// ---------------------------------------------------------------------------

namespace {

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos)
        return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"')
            quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string csv_real(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.10g", value);
    return buffer;
}

} // namespace

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
    out << "rep,learner,iteration,trajectories,perf_true,perf_model,est_error,model_error,"
           "wall_ms\n";
    for (const auto& r : records)
        out << r.repetition << ',' << csv_field(r.learner) << ',' << r.iteration << ','
            << r.trajectories << ',' << csv_real(r.perf_true) << ',' << csv_real(r.perf_model)
            << ',' << csv_real(r.est_error) << ',' << csv_real(r.model_error) << ','
            << csv_real(r.wall_ms) << '\n';
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
    out << "learner,trajectories";
    for (const char* metric : {"perf_true", "perf_model", "est_error", "model_error"})
        out << ",mean_" << metric << ",ci_lo_" << metric << ",ci_hi_" << metric;
    out << '\n';
    for (const auto& row : rows) {
        out << csv_field(row.learner) << ',' << row.trajectories;
        for (const double* metric : {row.perf_true, row.perf_model, row.est_error,
                                     row.model_error})
            out << ',' << csv_real(metric[0]) << ',' << csv_real(metric[1]) << ','
                << csv_real(metric[2]);
        out << '\n';
    }
}

} // namespace ramdp
