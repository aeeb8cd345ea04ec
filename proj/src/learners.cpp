#include "ramdp/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ramdp {

void CountTable::add(const CountTable& other) {
    if (pair_count.size() != other.pair_count.size() ||
        trans_count.size() != other.trans_count.size())
        throw std::invalid_argument("CountTable::add: size mismatch");
    for (std::size_t i = 0; i < pair_count.size(); ++i)
        pair_count[i] += other.pair_count[i];
    for (std::size_t i = 0; i < trans_count.size(); ++i)
        trans_count[i] += other.trans_count[i];
}

void CountTable::reset() {
    std::fill(pair_count.begin(), pair_count.end(), 0);
    std::fill(trans_count.begin(), trans_count.end(), 0);
}

std::int64_t CountTable::total_steps() const {
    return std::accumulate(pair_count.begin(), pair_count.end(), std::int64_t{0});
}

std::string method_name(LearnMethod method) {
    switch (method) {
    case LearnMethod::Lui: return "lui";
    case LearnMethod::Pac: return "pac";
    case LearnMethod::Map: return "map";
    case LearnMethod::Ucrl2: return "ucrl2";
    }
    return "?";
}

void LearnerConfig::validate() const {
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw std::invalid_argument("learner config: epsilon must lie in (0, 0.5)");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("learner config: gamma must lie in (0, 1)");
    if (!(prior_strength.lo >= 1 && prior_strength.lo <= prior_strength.hi))
        throw std::invalid_argument("learner config: need 1 <= strength lo <= hi");
    if (map_prior_alpha < 1.0)
        throw std::invalid_argument("learner config: alpha must be >= 1");
    if (strength_cap) {
        if (method != LearnMethod::Lui)
            throw std::invalid_argument("learner config: strength cap applies to LUI only");
        if (strength_cap->lo < prior_strength.lo || strength_cap->hi < prior_strength.hi ||
            strength_cap->lo > strength_cap->hi)
            throw std::invalid_argument("learner config: cap must dominate the prior strength");
    }
}

const UncertainMdp* as_umdp(const LearnedModel& model) {
    return std::get_if<UncertainMdp>(&model);
}

const Mdp* as_mdp(const LearnedModel& model) {
    return std::get_if<Mdp>(&model);
}

// ---------------------------------------------------------------------------
// LUI
// ---------------------------------------------------------------------------

StrengthInterval cap_strength(StrengthInterval strength, StrengthInterval cap, std::int64_t n) {
    return {std::min(strength.lo + n, cap.lo), std::min(strength.hi + n, cap.hi)};
}

std::vector<LuiTransitionState> lui_update(std::span<const LuiTransitionState> priors,
                                           std::span<const std::int64_t> counts,
                                           std::optional<StrengthInterval> cap) {
    const std::size_t m = priors.size();
    if (m == 0 || counts.size() != m)
        throw std::invalid_argument("lui_update: mismatched inputs");

    std::int64_t total = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (counts[i] < 0)
            throw std::invalid_argument("lui_update: negative count");
        const auto& prior = priors[i];
        if (!(prior.lower > 0.0 && prior.lower <= prior.upper && prior.upper <= 1.0))
            throw std::invalid_argument("lui_update: invalid prior interval");
        if (!(prior.strength.lo >= 1 && prior.strength.lo <= prior.strength.hi))
            throw std::invalid_argument("lui_update: invalid prior strength");
        total += counts[i];
    }
    if (total < 1)
        throw std::invalid_argument("lui_update: needs at least one observation");
    const double n = static_cast<double>(total);

    // Agreement is decided once per pair and bound type, quantified over all
    // successors.
    bool lower_agrees = true, upper_agrees = true;
    for (std::size_t i = 0; i < m; ++i) {
        const double freq = static_cast<double>(counts[i]) / n;
        if (freq < priors[i].lower)
            lower_agrees = false;
        if (freq > priors[i].upper)
            upper_agrees = false;
    }

    std::vector<LuiTransitionState> posterior(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& prior = priors[i];
        const double k = static_cast<double>(counts[i]);
        const double lower_w = static_cast<double>(lower_agrees ? prior.strength.hi
                                                                : prior.strength.lo);
        const double upper_w = static_cast<double>(upper_agrees ? prior.strength.hi
                                                                : prior.strength.lo);
        posterior[i].lower = (lower_w * prior.lower + k) / (lower_w + n);
        posterior[i].upper = (upper_w * prior.upper + k) / (upper_w + n);
        posterior[i].strength =
            cap ? cap_strength(prior.strength, *cap, total)
                : StrengthInterval{prior.strength.lo + total, prior.strength.hi + total};
    }
    return posterior;
}

// ---------------------------------------------------------------------------
// MAP / PAC / UCRL2
// ---------------------------------------------------------------------------

std::optional<std::vector<double>> map_point_estimate(std::span<const double> alphas,
                                                      std::span<const std::int64_t> counts) {
    const std::size_t m = alphas.size();
    if (m == 0 || counts.size() != m)
        throw std::invalid_argument("map_point_estimate: mismatched inputs");

    double posterior_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (alphas[i] < 1.0)
            throw std::invalid_argument("map_point_estimate: alphas must be >= 1");
        posterior_sum += alphas[i] + static_cast<double>(counts[i]);
    }
    const double denom = posterior_sum - static_cast<double>(m);
    if (denom <= 0.0)
        return std::nullopt; // mode undefined; caller falls back to uniform

    std::vector<double> estimate(m);
    for (std::size_t i = 0; i < m; ++i)
        estimate[i] = (alphas[i] + static_cast<double>(counts[i]) - 1.0) / denom;
    return estimate;
}

PacBudget pac_error_budget(const Mdp& graph, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("pac_error_budget: gamma must lie in (0, 1)");
    std::int64_t stochastic_transitions = 0;
    for (int p = 0; p < graph.pair_count(); ++p) {
        const int succs = graph.succ_begin[p + 1] - graph.succ_begin[p];
        if (succs > 1)
            stochastic_transitions += succs;
    }
    if (stochastic_transitions == 0)
        return {gamma, true};
    return {gamma / static_cast<double>(stochastic_transitions), false};
}

std::vector<std::pair<double, double>> pac_intervals(std::span<const double> estimates,
                                                     std::int64_t n, double gamma_p,
                                                     double epsilon) {
    if (n < 1)
        throw std::invalid_argument("pac_intervals: need N >= 1");
    const double delta = std::sqrt(std::log(2.0 / gamma_p) / (2.0 * static_cast<double>(n)));
    std::vector<std::pair<double, double>> intervals(estimates.size());
    for (std::size_t i = 0; i < estimates.size(); ++i)
        intervals[i] = {std::max(epsilon, estimates[i] - delta),
                        std::min(estimates[i] + delta, 1.0)};
    return intervals;
}

std::vector<std::pair<double, double>> ucrl2_intervals(std::span<const double> estimates,
                                                       int state_count, int action_count,
                                                       std::int64_t t_k, std::int64_t n,
                                                       double gamma, double epsilon) {
    if (t_k < 1)
        throw std::invalid_argument("ucrl2_intervals: need t_k >= 1");
    const double radius =
        std::sqrt(14.0 * static_cast<double>(state_count) *
                  std::log(2.0 * static_cast<double>(action_count) *
                           static_cast<double>(t_k) / gamma) /
                  static_cast<double>(std::max<std::int64_t>(1, n)));
    std::vector<std::pair<double, double>> intervals(estimates.size());
    for (std::size_t i = 0; i < estimates.size(); ++i)
        intervals[i] = {std::max(epsilon, estimates[i] - radius),
                        std::min(estimates[i] + radius, 1.0)};
    return intervals;
}

// ---------------------------------------------------------------------------
// Full learner
// ---------------------------------------------------------------------------

LearnerState make_learner_state(const LearnerConfig& config, const Mdp& graph) {
    config.validate();
    if (auto report = validate_mdp(graph); !report.ok())
        throw std::invalid_argument("make_learner_state: invalid graph: " + report.summary());

    LearnerState state;
    state.graph = graph;
    state.pair_is_point.resize(graph.pair_count());
    for (int p = 0; p < graph.pair_count(); ++p)
        state.pair_is_point[p] = graph.succ_begin[p + 1] - graph.succ_begin[p] == 1;

    if (config.method == LearnMethod::Lui) {
        PriorUmdp prior = initial_prior_umdp(graph, config.epsilon, config.prior_strength);
        state.lui.resize(graph.transition_count());
        for (int t = 0; t < graph.transition_count(); ++t)
            state.lui[t] = {prior.umdp.succ_lo[t], prior.umdp.succ_hi[t], prior.strengths[t]};
    } else {
        state.cumulative = CountTable(graph);
        if (config.method != LearnMethod::Map) {
            const PacBudget budget = pac_error_budget(graph, config.gamma);
            state.gamma_p = budget.gamma_p;
            state.gamma_p_degenerate = budget.degenerate;
        }
    }
    return state;
}

namespace {

UncertainMdp umdp_from_graph(const Mdp& graph) {
    UncertainMdp u;
    u.num_states = graph.num_states;
    u.num_actions = graph.num_actions;
    u.initial_state = graph.initial_state;
    u.pair_begin = graph.pair_begin;
    u.pair_state = graph.pair_state;
    u.pair_action = graph.pair_action;
    u.pair_reward = graph.pair_reward;
    u.succ_begin = graph.succ_begin;
    u.succ_state = graph.succ_state;
    u.state_labels = graph.state_labels;
    u.action_labels = graph.action_labels;
    u.succ_lo.resize(graph.transition_count());
    u.succ_hi.resize(graph.transition_count());
    return u;
}

// Point estimates for one pair from the cumulative Dirichlet state; uniform
// when the mode is undefined.
std::vector<double> pair_estimates(const LearnerConfig& config, const LearnerState& state,
                                   int pair) {
    const int begin = state.graph.succ_begin[pair];
    const int m = state.graph.succ_begin[pair + 1] - begin;
    std::vector<double> alphas(m, config.map_prior_alpha);
    std::span<const std::int64_t> counts(state.cumulative.trans_count.data() + begin, m);
    auto estimate = map_point_estimate(alphas, counts);
    if (!estimate)
        return std::vector<double>(m, 1.0 / m);
    return *estimate;
}

LearnedModel interval_model(const LearnerConfig& config, const LearnerState& state,
                            std::int64_t t_k) {
    UncertainMdp u = umdp_from_graph(state.graph);
    for (int p = 0; p < state.graph.pair_count(); ++p) {
        const int begin = state.graph.succ_begin[p];
        const int m = state.graph.succ_begin[p + 1] - begin;
        if (state.pair_is_point[p]) {
            u.succ_lo[begin] = 1.0;
            u.succ_hi[begin] = 1.0;
            continue;
        }
        const std::int64_t n = state.cumulative.pair_count[p];
        if (n == 0) {
            for (int i = 0; i < m; ++i) {
                u.succ_lo[begin + i] = config.epsilon;
                u.succ_hi[begin + i] = 1.0 - config.epsilon;
            }
            continue;
        }
        const std::vector<double> estimates = pair_estimates(config, state, p);
        const auto intervals =
            config.method == LearnMethod::Pac
                ? pac_intervals(estimates, n, state.gamma_p, config.epsilon)
                : ucrl2_intervals(estimates, state.graph.num_states, state.graph.num_actions,
                                  std::max<std::int64_t>(1, t_k), n, config.gamma,
                                  config.epsilon);
        for (int i = 0; i < m; ++i) {
            u.succ_lo[begin + i] = intervals[i].first;
            u.succ_hi[begin + i] = intervals[i].second;
        }
    }
    return u;
}

LearnedModel map_model(const LearnerConfig& config, const LearnerState& state) {
    Mdp mdp = state.graph; // copies structure and rewards
    for (int p = 0; p < state.graph.pair_count(); ++p) {
        const int begin = state.graph.succ_begin[p];
        if (state.pair_is_point[p]) {
            mdp.succ_prob[begin] = 1.0;
            continue;
        }
        const std::vector<double> estimates = pair_estimates(config, state, p);
        for (std::size_t i = 0; i < estimates.size(); ++i)
            mdp.succ_prob[begin + i] = estimates[i];
    }
    return mdp;
}

LearnedModel lui_model(const LearnerState& state) {
    UncertainMdp u = umdp_from_graph(state.graph);
    for (int t = 0; t < state.graph.transition_count(); ++t) {
        u.succ_lo[t] = state.lui[t].lower;
        u.succ_hi[t] = state.lui[t].upper;
    }
    return u;
}

} // namespace

LearnedModel prior_model(const LearnerConfig& config, const LearnerState& state) {
    if (config.method == LearnMethod::Lui)
        return lui_model(state);
    if (config.method == LearnMethod::Map)
        return map_model(config, state);
    return interval_model(config, state, 1);
}

LearnedModel learner_step(const LearnerConfig& config, LearnerState& state,
                          const CountTable& iteration_counts, std::int64_t t_k) {
    const Mdp& graph = state.graph;
    if (static_cast<int>(iteration_counts.pair_count.size()) != graph.pair_count() ||
        static_cast<int>(iteration_counts.trans_count.size()) != graph.transition_count())
        throw std::invalid_argument("learner_step: counts not aligned with the graph");

    for (int p = 0; p < graph.pair_count(); ++p) {
        std::int64_t sum = 0;
        for (int t = graph.succ_begin[p]; t < graph.succ_begin[p + 1]; ++t)
            sum += iteration_counts.trans_count[t];
        if (sum != iteration_counts.pair_count[p])
            throw std::invalid_argument("learner_step: inconsistent counts at pair " +
                                        std::to_string(p));
    }

    if (config.method == LearnMethod::Lui) {
        for (int p = 0; p < graph.pair_count(); ++p) {
            if (state.pair_is_point[p] || iteration_counts.pair_count[p] < 1)
                continue;
            const int begin = graph.succ_begin[p];
            const int m = graph.succ_begin[p + 1] - begin;
            std::span<const LuiTransitionState> priors(state.lui.data() + begin, m);
            std::span<const std::int64_t> counts(iteration_counts.trans_count.data() + begin, m);
            const auto posterior = lui_update(priors, counts, config.strength_cap);
            std::copy(posterior.begin(), posterior.end(), state.lui.begin() + begin);
        }
        return lui_model(state);
    }

    state.cumulative.add(iteration_counts);
    if (config.method == LearnMethod::Map)
        return map_model(config, state);
    return interval_model(config, state, t_k);
}

} // namespace ramdp
