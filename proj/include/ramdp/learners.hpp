#pragma once

#include "ramdp/model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ramdp {

// ---------------------------------------------------------------------------
// Counters
// ---------------------------------------------------------------------------

/// Visit counters aligned with a model's CSR layout: one entry per (state,
/// action) pair and one per supported transition.
struct CountTable {
    std::vector<std::int64_t> pair_count;
    std::vector<std::int64_t> trans_count;

    CountTable() = default;
    explicit CountTable(const Mdp& graph)
        : pair_count(graph.pair_count(), 0), trans_count(graph.transition_count(), 0) {}

    void add(const CountTable& other);
    void reset();
    std::int64_t total_steps() const;
};

// ---------------------------------------------------------------------------
// Learner configuration and per-transition learning state
// ---------------------------------------------------------------------------

enum class LearnMethod { Lui, Pac, Map, Ucrl2 };

std::string method_name(LearnMethod method);

struct LuiTransitionState {
    double lower = 0.0;
    double upper = 0.0;
    StrengthInterval strength;
};

struct LearnerConfig {
    LearnMethod method = LearnMethod::Lui;
    std::string name;                        // CSV column; defaults to the method name
    double epsilon = 1e-4;                   // interval floor
    StrengthInterval prior_strength{5, 10};  // LUI prior strength
    std::optional<StrengthInterval> strength_cap; // LUI only
    double map_prior_alpha = 10.0;           // Dirichlet prior parameter
    double gamma = 0.01;                     // global error rate (PAC / UCRL2)

    void validate() const; // throws std::invalid_argument on bad fields
};

/// A learned model: interval methods produce an UncertainMdp, MAP a point
/// estimate Mdp.
using LearnedModel = std::variant<UncertainMdp, Mdp>;

const UncertainMdp* as_umdp(const LearnedModel& model);
const Mdp* as_mdp(const LearnedModel& model);

// ---------------------------------------------------------------------------
// Elementary update rules
// ---------------------------------------------------------------------------

/// Posterior of the linearly-updating-interval rule for one (state, action)
/// pair. `priors` holds one entry per successor, `counts[i]` the number of
/// observations of successor i, with N = sum(counts) >= 1. The prior-data
/// agreement test is shared across all successors of the pair, separately per
/// bound: lower bounds agree when every empirical frequency k_j/N lies at or
/// above its prior lower bound, upper bounds agree when every frequency lies
/// at or below its prior upper bound. Agreement updates with the strong
/// strength n_hi, conflict with the weak strength n_lo. Strength intervals
/// grow by N, truncated component-wise at `cap` when given.
std::vector<LuiTransitionState> lui_update(std::span<const LuiTransitionState> priors,
                                           std::span<const std::int64_t> counts,
                                           std::optional<StrengthInterval> cap = std::nullopt);

/// (min(n_lo + N, cap_lo), min(n_hi + N, cap_hi))
StrengthInterval cap_strength(StrengthInterval strength, StrengthInterval cap, std::int64_t n);

/// Mode of the posterior Dirichlet: ((alpha_i + k_i) - 1) / (sum_j (alpha_j +
/// k_j) - m). Returns nullopt when the denominator degenerates (all posterior
/// parameters equal 1); callers fall back to the uniform distribution.
std::optional<std::vector<double>> map_point_estimate(std::span<const double> alphas,
                                                      std::span<const std::int64_t> counts);

struct PacBudget {
    double gamma_p = 0.0;
    bool degenerate = false; // fully deterministic graph: no interval to learn
};

/// Distributes the global error rate over all transitions of pairs with more
/// than one successor. Degenerate (fully deterministic) graphs are reported
/// and return gamma itself.
PacBudget pac_error_budget(const Mdp& graph, double gamma);

/// Hoeffding intervals around point estimates: delta = sqrt(ln(2/gamma_p) /
/// (2N)), clamped to [max(epsilon, est - delta), min(est + delta, 1)].
std::vector<std::pair<double, double>> pac_intervals(std::span<const double> estimates,
                                                     std::int64_t n, double gamma_p,
                                                     double epsilon);

/// UCRL2-style intervals: one radius sqrt(14 S ln(2 A t_k / gamma) / max(1,N))
/// shared by all successors of the pair, clamped like PAC intervals.
std::vector<std::pair<double, double>> ucrl2_intervals(std::span<const double> estimates,
                                                       int state_count, int action_count,
                                                       std::int64_t t_k, std::int64_t n,
                                                       double gamma, double epsilon);

// ---------------------------------------------------------------------------
// Full learner
// ---------------------------------------------------------------------------

struct LearnerState {
    Mdp graph;                 // known support (rewards included)
    std::vector<char> pair_is_point; // single probability-1 successor
    std::vector<LuiTransitionState> lui; // per transition (LUI)
    CountTable cumulative;     // all observations so far (PAC / MAP / UCRL2)
    double gamma_p = 0.0;
    bool gamma_p_degenerate = false;
};

LearnerState make_learner_state(const LearnerConfig& config, const Mdp& graph);

/// Model before any data: the prior uMDP for interval methods, the prior
/// Dirichlet mode for MAP.
LearnedModel prior_model(const LearnerConfig& config, const LearnerState& state);

/// One update round. LUI folds the iteration counts into its intervals pair
/// by pair (pairs without new data keep their state); the cumulative methods
/// absorb the counts and recompute every interval. `t_k` is the cumulative
/// number of sampled transitions, used by UCRL2.
LearnedModel learner_step(const LearnerConfig& config, LearnerState& state,
                          const CountTable& iteration_counts, std::int64_t t_k);

} // namespace ramdp
