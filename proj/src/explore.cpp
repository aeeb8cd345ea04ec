#include "ramdp/explore.hpp"

#include <algorithm>
#include <stdexcept>

namespace ramdp {

int SamplingOracle::sample_transition(int pair, Rng& rng) {
    const Mdp& mdp = current_mdp();
    const int begin = mdp.succ_begin[pair];
    const int m = mdp.succ_begin[pair + 1] - begin;
    std::span<const double> probs(mdp.succ_prob.data() + begin, m);
    return begin + rng.sample(probs);
}

SwitchingOracle::SwitchingOracle(Mdp env_a, Mdp env_b, std::int64_t switch_after)
    : env_a_(std::move(env_a)), env_b_(std::move(env_b)), switch_after_(switch_after) {
    if (!same_support(env_a_, env_b_))
        throw std::invalid_argument("SwitchingOracle: environments must share their support");
}

Policy optimistic_policy(const UncertainMdp& umdp, const Specification& spec,
                         const SolveOptions& options) {
    return robust_value_iteration(umdp, spec.with_semantics(Semantics::Optimistic), options)
        .policy;
}

template <typename Model>
Policy randomize_policy(const Model& model, const Policy& policy, double xi) {
    if (!policy.deterministic)
        throw std::invalid_argument("randomize_policy: input policy must be deterministic");
    if (xi < 0.0 || xi > 1.0)
        throw std::invalid_argument("randomize_policy: xi must lie in [0, 1]");

    Policy randomized;
    randomized.deterministic = false;
    randomized.pair_weight.assign(model.pair_count(), 0.0);
    for (int s = 0; s < model.num_states; ++s) {
        const int chosen = model.find_pair(s, policy.choice[s]);
        if (chosen < 0)
            throw std::invalid_argument("randomize_policy: disabled action at s" +
                                        std::to_string(s));
        const int enabled = model.pair_begin[s + 1] - model.pair_begin[s];
        if (enabled == 1) {
            randomized.pair_weight[chosen] = 1.0;
            continue;
        }
        const double other = (1.0 - xi) / (enabled - 1);
        for (int p = model.pair_begin[s]; p < model.pair_begin[s + 1]; ++p)
            randomized.pair_weight[p] = p == chosen ? xi : other;
    }
    return randomized;
}

template Policy randomize_policy<Mdp>(const Mdp&, const Policy&, double);
template Policy randomize_policy<UncertainMdp>(const UncertainMdp&, const Policy&, double);

Policy uniform_policy(const Mdp& model) {
    Policy policy;
    policy.deterministic = false;
    policy.pair_weight.assign(model.pair_count(), 0.0);
    for (int s = 0; s < model.num_states; ++s) {
        const int enabled = model.pair_begin[s + 1] - model.pair_begin[s];
        for (int p = model.pair_begin[s]; p < model.pair_begin[s + 1]; ++p)
            policy.pair_weight[p] = 1.0 / enabled;
    }
    return policy;
}

namespace {

// Exploration restarts once the specification's outcome is settled: target
// states, probability-zero states for reachability, divergent states for
// expected reward.
bool is_restart_state(int state, const Specification& spec,
                      const StateClassification& cls) {
    if (spec.kind == SpecKind::ExpectedReward)
        return cls.reward_divergent[state];
    return cls.prob0[state];
}

int draw_pair(const Mdp& graph, const Policy& policy, int state, Rng& rng) {
    if (policy.deterministic) {
        const int pair = graph.find_pair(state, policy.choice[state]);
        if (pair < 0)
            throw std::invalid_argument("sample_trajectory: disabled action at s" +
                                        std::to_string(state));
        return pair;
    }
    const int begin = graph.pair_begin[state];
    const int m = graph.pair_begin[state + 1] - begin;
    std::span<const double> weights(policy.pair_weight.data() + begin, m);
    return begin + rng.sample(weights);
}

} // namespace

Trajectory sample_trajectory(SamplingOracle& oracle, const Policy& policy,
                             const Specification& spec,
                             const StateClassification& classification, int horizon,
                             Rng& rng) {
    const Mdp& graph = oracle.graph();
    Trajectory trajectory;
    int state = graph.initial_state;

    while (true) {
        if (spec.is_target(state)) {
            trajectory.terminated_by = Trajectory::End::TargetReached;
            return trajectory;
        }
        if (is_restart_state(state, spec, classification)) {
            trajectory.terminated_by = Trajectory::End::AbsorbingNonTarget;
            return trajectory;
        }
        if (static_cast<int>(trajectory.steps.size()) >= horizon) {
            trajectory.terminated_by = Trajectory::End::HorizonH;
            return trajectory;
        }
        const int pair = draw_pair(graph, policy, state, rng);
        const int transition = oracle.sample_transition(pair, rng);
        const int successor = graph.succ_state[transition];
        trajectory.steps.push_back(
            {state, graph.pair_action[pair], successor, pair, transition});
        state = successor;
    }
}

CountTable run_iteration(ScheduleState& schedule, SamplingOracle& oracle,
                         const Policy& policy, const Specification& spec,
                         const StateClassification& classification, int horizon,
                         std::int64_t budget_remaining, Rng& rng,
                         bool doubling_on_transitions) {
    if (budget_remaining < 1)
        throw std::invalid_argument("run_iteration: trajectory budget exhausted");

    // A counter qualifies once it was touched this iteration and reached its
    // pre-iteration global total.
    auto doubled = [&]() {
        const auto& now = doubling_on_transitions ? schedule.iteration.trans_count
                                                  : schedule.iteration.pair_count;
        const auto& before = doubling_on_transitions ? schedule.global.trans_count
                                                     : schedule.global.pair_count;
        for (std::size_t i = 0; i < now.size(); ++i)
            if (now[i] >= 1 && now[i] >= before[i])
                return true;
        return false;
    };

    std::int64_t taken = 0;
    do {
        oracle.on_trajectory_start();
        const Trajectory trajectory =
            sample_trajectory(oracle, policy, spec, classification, horizon, rng);
        for (const auto& step : trajectory.steps) {
            schedule.iteration.pair_count[step.pair]++;
            schedule.iteration.trans_count[step.transition]++;
        }
        schedule.trajectories_done++;
        taken++;
    } while (!doubled() && taken < budget_remaining);

    CountTable merged_out = schedule.iteration;
    schedule.global.add(schedule.iteration);
    schedule.iteration.reset();
    return merged_out;
}

} // namespace ramdp
