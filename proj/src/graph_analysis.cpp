#include "ramdp/model.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

// Qualitative reachability analysis on the support graph. All routines ignore
// probabilities; only the positivity pattern matters, so the classification of
// an uncertain MDP coincides with that of any MDP instance inside it.

namespace ramdp {

namespace {

// Support of a model with, for ReachAvoid, avoid states made absorbing.
struct Support {
    int num_states = 0;
    std::vector<int> pair_begin;
    std::vector<int> succ_begin;
    std::vector<int> succ_state;
};

template <typename Model>
Support make_support(const Model& model, const std::vector<int>& absorbing) {
    std::vector<char> absorb(model.num_states, 0);
    for (int s : absorbing)
        absorb[s] = 1;

    Support sup;
    sup.num_states = model.num_states;
    sup.pair_begin.assign(model.num_states + 1, 0);
    sup.succ_begin.push_back(0);
    for (int s = 0; s < model.num_states; ++s) {
        if (absorb[s]) {
            sup.succ_state.push_back(s);
            sup.succ_begin.push_back(static_cast<int>(sup.succ_state.size()));
        } else {
            for (int p = model.pair_begin[s]; p < model.pair_begin[s + 1]; ++p) {
                for (int t = model.succ_begin[p]; t < model.succ_begin[p + 1]; ++t)
                    sup.succ_state.push_back(model.succ_state[t]);
                sup.succ_begin.push_back(static_cast<int>(sup.succ_state.size()));
            }
        }
        sup.pair_begin[s + 1] = static_cast<int>(sup.succ_begin.size()) - 1;
    }
    return sup;
}

// States from which `from` is reachable along some path (any action choices).
std::vector<char> exists_reach(const Support& sup, const std::vector<char>& from) {
    std::vector<char> reach = from;
    std::vector<int> stack;
    for (int s = 0; s < sup.num_states; ++s)
        if (reach[s])
            stack.push_back(s);

    // Reverse edges, built once.
    std::vector<std::vector<int>> preds(sup.num_states);
    for (int s = 0; s < sup.num_states; ++s)
        for (int p = sup.pair_begin[s]; p < sup.pair_begin[s + 1]; ++p)
            for (int t = sup.succ_begin[p]; t < sup.succ_begin[p + 1]; ++t)
                preds[sup.succ_state[t]].push_back(s);

    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        for (int pred : preds[s])
            if (!reach[pred]) {
                reach[pred] = 1;
                stack.push_back(pred);
            }
    }
    return reach;
}

// Greatest U within the complement of `target` such that from every state of
// U some action keeps all successors inside U: the region where a controller
// can surely avoid the target forever.
std::vector<char> avoid_core(const Support& sup, const std::vector<char>& target) {
    std::vector<char> in(sup.num_states, 1);
    for (int s = 0; s < sup.num_states; ++s)
        if (target[s])
            in[s] = 0;

    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < sup.num_states; ++s) {
            if (!in[s])
                continue;
            bool has_safe_action = false;
            for (int p = sup.pair_begin[s]; p < sup.pair_begin[s + 1] && !has_safe_action; ++p) {
                bool stays = true;
                for (int t = sup.succ_begin[p]; t < sup.succ_begin[p + 1]; ++t)
                    if (!in[sup.succ_state[t]]) {
                        stays = false;
                        break;
                    }
                has_safe_action = stays;
            }
            if (!has_safe_action) {
                in[s] = 0;
                changed = true;
            }
        }
    }
    return in;
}

// States with a policy reaching the target with probability one (the classic
// double fixpoint).
std::vector<char> prob1_exists(const Support& sup, const std::vector<char>& target) {
    std::vector<char> universe(sup.num_states, 1);
    while (true) {
        std::vector<char> reached = target;
        bool grew = true;
        while (grew) {
            grew = false;
            for (int s = 0; s < sup.num_states; ++s) {
                if (reached[s] || !universe[s])
                    continue;
                for (int p = sup.pair_begin[s]; p < sup.pair_begin[s + 1]; ++p) {
                    bool inside = true, touches = false;
                    for (int t = sup.succ_begin[p]; t < sup.succ_begin[p + 1]; ++t) {
                        const int succ = sup.succ_state[t];
                        if (!universe[succ])
                            inside = false;
                        if (reached[succ])
                            touches = true;
                    }
                    if (inside && touches) {
                        reached[s] = 1;
                        grew = true;
                        break;
                    }
                }
            }
        }
        if (reached == universe)
            return universe;
        universe = std::move(reached);
    }
}

std::vector<char> to_mask(int num_states, const std::vector<int>& states) {
    std::vector<char> mask(num_states, 0);
    for (int s : states) {
        if (s < 0 || s >= num_states)
            throw std::invalid_argument("classify_states: state index out of range");
        mask[s] = 1;
    }
    return mask;
}

std::vector<bool> to_bools(const std::vector<char>& mask) {
    return std::vector<bool>(mask.begin(), mask.end());
}

std::vector<bool> negate(const std::vector<char>& mask) {
    std::vector<bool> out(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        out[i] = !mask[i];
    return out;
}

std::vector<char> negate_chars(const std::vector<char>& mask) {
    std::vector<char> out(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        out[i] = mask[i] ? 0 : 1;
    return out;
}

template <typename Model>
StateClassification classify_impl(const Model& model, const Specification& spec) {
    if (spec.targets.empty())
        throw std::invalid_argument("classify_states: empty target set");
    for (int t : spec.targets)
        if (spec.is_avoid(t))
            throw std::invalid_argument("classify_states: targets and avoid states overlap");

    const Support sup = make_support(
        model, spec.kind == SpecKind::ReachAvoid ? spec.avoid : std::vector<int>{});
    const std::vector<char> target = to_mask(model.num_states, spec.targets);

    StateClassification out;
    const std::vector<char> can_reach = exists_reach(sup, target);
    const std::vector<char> core = avoid_core(sup, target);
    const std::vector<char> always_one = negate_chars(exists_reach(sup, core));
    const std::vector<char> exists_one = prob1_exists(sup, target);

    if (spec.direction == Direction::Max) {
        out.prob0 = negate(can_reach);
        out.prob1 = to_bools(exists_one);
    } else {
        out.prob0 = to_bools(core);
        out.prob1 = to_bools(always_one);
    }

    if (spec.kind == SpecKind::ExpectedReward) {
        // Reward to reach T diverges when T is not reached almost surely: for
        // minimization the optimizer needs one almost-sure policy; for
        // maximization every policy must be almost-sure.
        out.reward_divergent = spec.direction == Direction::Min ? negate(exists_one)
                                                                : negate(always_one);
    } else {
        out.reward_divergent.assign(model.num_states, false);
    }
    return out;
}

} // namespace

StateClassification classify_states(const Mdp& mdp, const Specification& spec) {
    return classify_impl(mdp, spec);
}

StateClassification classify_states(const UncertainMdp& umdp, const Specification& spec) {
    return classify_impl(umdp, spec);
}

} // namespace ramdp
