#include "ramdp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ramdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void sort_by_value(std::vector<int>& order, std::span<const double> values,
                   InnerDirection direction) {
    if (direction == InnerDirection::AdversarialMin) {
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (values[a] != values[b])
                return values[a] < values[b];
            return a < b;
        });
    } else {
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (values[a] != values[b])
                return values[a] > values[b];
            return a < b;
        });
    }
}

} // namespace

std::vector<double> inner_extreme_distribution(std::span<const double> lower,
                                               std::span<const double> upper,
                                               std::span<const double> values,
                                               InnerDirection direction) {
    const std::size_t m = lower.size();
    if (m == 0 || upper.size() != m || values.size() != m)
        throw std::invalid_argument("inner_extreme_distribution: mismatched inputs");

    double lo_sum = std::accumulate(lower.begin(), lower.end(), 0.0);
    double hi_sum = std::accumulate(upper.begin(), upper.end(), 0.0);
    if (lo_sum > 1.0 + kProbTolerance || hi_sum < 1.0 - kProbTolerance)
        throw std::invalid_argument("inner_extreme_distribution: infeasible interval set");

    std::vector<double> p(lower.begin(), lower.end());
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    sort_by_value(order, values, direction);

    double residual = 1.0 - lo_sum;
    for (int i : order) {
        if (residual <= 0.0)
            break;
        const double add = std::min(upper[i] - lower[i], residual);
        p[i] += add;
        residual -= add;
    }
    return p;
}

namespace {

// One Bellman solve shared by the exact and robust paths. `Backup` maps a pair
// id and the current value vector to the action's expected value (reward term
// excluded).
template <typename Model, typename Backup>
SolveResult solve(const Model& model, const Specification& spec, const SolveOptions& options,
                  Backup&& backup) {
    const int S = model.num_states;
    const bool reward_spec = spec.kind == SpecKind::ExpectedReward;
    const StateClassification cls = classify_states(model, spec);

    std::vector<char> pinned(S, 0);
    std::vector<double> values(S, 0.0);
    if (reward_spec) {
        for (int t : spec.targets)
            pinned[t] = 1;
        for (int s = 0; s < S; ++s)
            if (cls.reward_divergent[s]) {
                pinned[s] = 1;
                values[s] = kInf;
            }
    } else {
        for (int s = 0; s < S; ++s) {
            if (cls.prob1[s]) {
                pinned[s] = 1;
                values[s] = 1.0;
            } else if (cls.prob0[s]) {
                pinned[s] = 1;
            }
        }
    }

    auto action_value = [&](int pair, const std::vector<double>& v) {
        for (int t = model.succ_begin[pair]; t < model.succ_begin[pair + 1]; ++t)
            if (std::isinf(v[model.succ_state[t]]))
                return kInf;
        const double base = reward_spec ? model.pair_reward[pair] : 0.0;
        return base + backup(pair, v);
    };

    auto bellman = [&](int s, const std::vector<double>& v) {
        double best = 0.0;
        bool first = true;
        for (int p = model.pair_begin[s]; p < model.pair_begin[s + 1]; ++p) {
            const double q = action_value(p, v);
            if (first || (spec.direction == Direction::Max ? q > best : q < best)) {
                best = q;
                first = false;
            }
        }
        return best;
    };

    SolveResult result;
    std::vector<double> next = values;
    double residual = 0.0;
    int sweeps = 0;
    for (; sweeps < options.max_iterations; ++sweeps) {
        residual = 0.0;
        for (int s = 0; s < S; ++s) {
            if (pinned[s])
                continue;
            next[s] = bellman(s, values);
            residual = std::max(residual, std::abs(next[s] - values[s]));
        }
        std::swap(values, next);
        if (residual <= options.tolerance) {
            ++sweeps;
            break;
        }
    }

    result.values = values;
    result.iterations = sweeps;
    result.residual = residual;

    // Greedy deterministic policy; ties fall to the lowest action index
    // (pairs are stored in ascending action order).
    result.policy.deterministic = true;
    result.policy.choice.resize(S);
    for (int s = 0; s < S; ++s) {
        int best_pair = model.pair_begin[s];
        double best = action_value(best_pair, values);
        for (int p = best_pair + 1; p < model.pair_begin[s + 1]; ++p) {
            const double q = action_value(p, values);
            if (spec.direction == Direction::Max ? q > best : q < best) {
                best = q;
                best_pair = p;
            }
        }
        result.policy.choice[s] = model.pair_action[best_pair];
    }
    return result;
}

InnerDirection nature_direction(const Specification& spec) {
    if (spec.semantics == Semantics::Pessimistic)
        return spec.direction == Direction::Max ? InnerDirection::AdversarialMin
                                                : InnerDirection::AdversarialMax;
    return spec.direction == Direction::Max ? InnerDirection::AdversarialMax
                                            : InnerDirection::AdversarialMin;
}

} // namespace

SolveResult exact_value_iteration(const Mdp& mdp, const Specification& spec,
                                  const SolveOptions& options) {
    if (spec.semantics != Semantics::Exact)
        throw std::invalid_argument("exact_value_iteration: semantics must be Exact");
    return solve(mdp, spec, options, [&](int pair, const std::vector<double>& v) {
        double sum = 0.0;
        for (int t = mdp.succ_begin[pair]; t < mdp.succ_begin[pair + 1]; ++t)
            sum += mdp.succ_prob[t] * v[mdp.succ_state[t]];
        return sum;
    });
}

SolveResult robust_value_iteration(const UncertainMdp& umdp, const Specification& spec,
                                   const SolveOptions& options) {
    if (spec.semantics == Semantics::Exact)
        throw std::invalid_argument(
            "robust_value_iteration: semantics must be Optimistic or Pessimistic");

    const InnerDirection nature = nature_direction(spec);
    std::vector<int> order;
    std::vector<double> succ_values;

    // Greedy mass assignment inlined over the CSR arrays; equivalent to
    // inner_extreme_distribution but allocation-free per backup.
    auto backup = [&, nature](int pair, const std::vector<double>& v) {
        const int begin = umdp.succ_begin[pair];
        const int m = umdp.succ_begin[pair + 1] - begin;
        order.resize(m);
        succ_values.resize(m);
        for (int i = 0; i < m; ++i) {
            order[i] = i;
            succ_values[i] = v[umdp.succ_state[begin + i]];
        }
        sort_by_value(order, succ_values, nature);

        double objective = 0.0;
        double residual = 1.0;
        for (int i = 0; i < m; ++i) {
            objective += umdp.succ_lo[begin + i] * succ_values[i];
            residual -= umdp.succ_lo[begin + i];
        }
        for (int i : order) {
            if (residual <= 0.0)
                break;
            const double add = std::min(umdp.succ_hi[begin + i] - umdp.succ_lo[begin + i],
                                        residual);
            objective += add * succ_values[i];
            residual -= add;
        }
        if (residual > kProbTolerance)
            throw std::invalid_argument("robust_value_iteration: infeasible intervals at pair " +
                                        std::to_string(pair));
        return objective;
    };
    return solve(umdp, spec, options, backup);
}

double evaluate_policy(const Mdp& mdp, const Policy& policy, const Specification& spec) {
    if (spec.semantics != Semantics::Exact)
        throw std::invalid_argument("evaluate_policy: semantics must be Exact");
    const Mdp chain = induce_markov_chain(mdp, policy);
    SolveOptions options;
    options.tolerance = 1e-9;
    return exact_value_iteration(chain, spec, options).values[mdp.initial_state];
}

} // namespace ramdp
