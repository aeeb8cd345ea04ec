#include "ramdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ramdp {

namespace {

template <typename Model>
int find_pair_impl(const Model& m, int state, int action) {
    for (int p = m.pair_begin[state]; p < m.pair_begin[state + 1]; ++p)
        if (m.pair_action[p] == action)
            return p;
    return -1;
}

std::string pair_name(int state, int action) {
    std::ostringstream os;
    os << "(s" << state << ",a" << action << ")";
    return os.str();
}

} // namespace

int Mdp::find_pair(int state, int action) const {
    return find_pair_impl(*this, state, action);
}

int UncertainMdp::find_pair(int state, int action) const {
    return find_pair_impl(*this, state, action);
}

bool Specification::is_target(int state) const {
    return std::binary_search(targets.begin(), targets.end(), state);
}

bool Specification::is_avoid(int state) const {
    return std::binary_search(avoid.begin(), avoid.end(), state);
}

std::string ValidationReport::summary() const {
    if (violations.empty())
        return "ok";
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i)
            os << "; ";
        os << violations[i].message;
    }
    return os.str();
}

ValidationReport validate_mdp(const Mdp& mdp) {
    ValidationReport report;
    auto flag = [&](int s, int a, std::string msg) {
        report.violations.push_back({s, a, std::move(msg)});
    };

    if (mdp.num_states <= 0 || mdp.initial_state < 0 || mdp.initial_state >= mdp.num_states)
        flag(-1, -1, "initial state out of range");

    for (int s = 0; s < mdp.num_states; ++s) {
        if (mdp.pair_begin[s] == mdp.pair_begin[s + 1])
            flag(s, -1, "no enabled action at s" + std::to_string(s));
        for (int p = mdp.pair_begin[s]; p < mdp.pair_begin[s + 1]; ++p) {
            const int a = mdp.pair_action[p];
            if (mdp.pair_reward[p] < 0.0)
                flag(s, a, "negative reward at " + pair_name(s, a));
            double sum = 0.0;
            for (int t = mdp.succ_begin[p]; t < mdp.succ_begin[p + 1]; ++t) {
                const double prob = mdp.succ_prob[t];
                if (prob <= 0.0 || prob > 1.0) {
                    std::ostringstream os;
                    os << "probability " << prob << " outside (0,1] at " << pair_name(s, a);
                    flag(s, a, os.str());
                }
                if (mdp.succ_state[t] < 0 || mdp.succ_state[t] >= mdp.num_states)
                    flag(s, a, "successor out of range at " + pair_name(s, a));
                sum += prob;
            }
            if (mdp.succ_begin[p] == mdp.succ_begin[p + 1]) {
                flag(s, a, "no successors at " + pair_name(s, a));
            } else if (std::abs(sum - 1.0) > kProbTolerance) {
                std::ostringstream os;
                os << "sum " << sum << " != 1 at " << pair_name(s, a);
                flag(s, a, os.str());
            }
        }
    }
    return report;
}

ValidationReport validate_umdp(const UncertainMdp& umdp) {
    ValidationReport report;
    auto flag = [&](int s, int a, std::string msg) {
        report.violations.push_back({s, a, std::move(msg)});
    };

    if (umdp.num_states <= 0 || umdp.initial_state < 0 || umdp.initial_state >= umdp.num_states)
        flag(-1, -1, "initial state out of range");

    for (int s = 0; s < umdp.num_states; ++s) {
        if (umdp.pair_begin[s] == umdp.pair_begin[s + 1])
            flag(s, -1, "no enabled action at s" + std::to_string(s));
        for (int p = umdp.pair_begin[s]; p < umdp.pair_begin[s + 1]; ++p) {
            const int a = umdp.pair_action[p];
            double lo_sum = 0.0, hi_sum = 0.0;
            for (int t = umdp.succ_begin[p]; t < umdp.succ_begin[p + 1]; ++t) {
                const double lo = umdp.succ_lo[t], hi = umdp.succ_hi[t];
                if (lo <= 0.0)
                    flag(s, a, "zero lower bound at " + pair_name(s, a));
                if (lo > hi || hi > 1.0) {
                    std::ostringstream os;
                    os << "invalid interval [" << lo << "," << hi << "] at " << pair_name(s, a);
                    flag(s, a, os.str());
                }
                lo_sum += lo;
                hi_sum += hi;
            }
            if (umdp.succ_begin[p] == umdp.succ_begin[p + 1]) {
                flag(s, a, "no successors at " + pair_name(s, a));
                continue;
            }
            if (lo_sum > 1.0 + kProbTolerance) {
                std::ostringstream os;
                os << "lower sum " << lo_sum << " > 1 at " << pair_name(s, a);
                flag(s, a, os.str());
            }
            if (hi_sum < 1.0 - kProbTolerance) {
                std::ostringstream os;
                os << "upper sum " << hi_sum << " < 1 at " << pair_name(s, a);
                flag(s, a, os.str());
            }
        }
    }
    return report;
}

namespace {

template <typename A, typename B>
bool structural_match(const A& a, const B& b) {
    return a.num_states == b.num_states && a.initial_state == b.initial_state &&
           a.pair_begin == b.pair_begin && a.pair_action == b.pair_action &&
           a.pair_reward == b.pair_reward && a.succ_begin == b.succ_begin &&
           a.succ_state == b.succ_state;
}

} // namespace

bool same_support(const Mdp& mdp, const UncertainMdp& umdp) {
    return structural_match(mdp, umdp);
}

bool same_support(const Mdp& a, const Mdp& b) {
    return structural_match(a, b);
}

PriorUmdp initial_prior_umdp(const Mdp& graph_source, double epsilon, StrengthInterval strength) {
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw std::invalid_argument("initial_prior_umdp: epsilon must lie in (0, 0.5)");
    if (!(strength.lo >= 1 && strength.lo <= strength.hi))
        throw std::invalid_argument("initial_prior_umdp: need 1 <= n_lo <= n_hi");
    if (auto report = validate_mdp(graph_source); !report.ok())
        throw std::invalid_argument("initial_prior_umdp: invalid graph source: " +
                                    report.summary());

    PriorUmdp prior;
    UncertainMdp& u = prior.umdp;
    u.num_states = graph_source.num_states;
    u.num_actions = graph_source.num_actions;
    u.initial_state = graph_source.initial_state;
    u.pair_begin = graph_source.pair_begin;
    u.pair_state = graph_source.pair_state;
    u.pair_action = graph_source.pair_action;
    u.pair_reward = graph_source.pair_reward;
    u.succ_begin = graph_source.succ_begin;
    u.succ_state = graph_source.succ_state;
    u.state_labels = graph_source.state_labels;
    u.action_labels = graph_source.action_labels;

    const int T = graph_source.transition_count();
    u.succ_lo.resize(T);
    u.succ_hi.resize(T);
    prior.strengths.assign(T, StrengthInterval{0, 0});

    for (int p = 0; p < graph_source.pair_count(); ++p) {
        const bool point = graph_source.succ_begin[p + 1] - graph_source.succ_begin[p] == 1;
        for (int t = graph_source.succ_begin[p]; t < graph_source.succ_begin[p + 1]; ++t) {
            if (point) {
                u.succ_lo[t] = 1.0;
                u.succ_hi[t] = 1.0;
            } else {
                u.succ_lo[t] = epsilon;
                u.succ_hi[t] = 1.0 - epsilon;
                prior.strengths[t] = strength;
            }
        }
    }
    return prior;
}

Mdp induce_markov_chain(const Mdp& mdp, const Policy& policy) {
    MdpBuilder builder;
    builder.initial(mdp.initial_state).states(mdp.num_states);

    for (int s = 0; s < mdp.num_states; ++s) {
        std::vector<std::pair<int, double>> mixture;
        double reward = 0.0;
        int action_id = 0;

        auto accumulate = [&](int pair, double weight) {
            reward += weight * mdp.pair_reward[pair];
            for (int t = mdp.succ_begin[pair]; t < mdp.succ_begin[pair + 1]; ++t)
                mixture.emplace_back(mdp.succ_state[t], weight * mdp.succ_prob[t]);
        };

        if (policy.deterministic) {
            if (s >= static_cast<int>(policy.choice.size()))
                throw std::invalid_argument("induce_markov_chain: policy not defined on s" +
                                            std::to_string(s));
            const int pair = mdp.find_pair(s, policy.choice[s]);
            if (pair < 0)
                throw std::invalid_argument("induce_markov_chain: disabled action a" +
                                            std::to_string(policy.choice[s]) + " at s" +
                                            std::to_string(s));
            action_id = policy.choice[s];
            accumulate(pair, 1.0);
        } else {
            double total = 0.0;
            for (int p = mdp.pair_begin[s]; p < mdp.pair_begin[s + 1]; ++p) {
                const double w = policy.pair_weight[p];
                if (w < 0.0)
                    throw std::invalid_argument("induce_markov_chain: negative policy weight");
                if (w > 0.0)
                    accumulate(p, w);
                total += w;
            }
            if (std::abs(total - 1.0) > kProbTolerance)
                throw std::invalid_argument("induce_markov_chain: weights at s" +
                                            std::to_string(s) + " sum to " +
                                            std::to_string(total));
        }

        // Merge duplicate successors of the mixture.
        std::sort(mixture.begin(), mixture.end());
        std::vector<std::pair<int, double>> merged;
        for (const auto& [succ, prob] : mixture) {
            if (!merged.empty() && merged.back().first == succ)
                merged.back().second += prob;
            else
                merged.emplace_back(succ, prob);
        }
        builder.row(s, action_id, reward, std::move(merged));
    }

    Mdp chain = builder.finalize();
    chain.num_actions = mdp.num_actions;
    chain.state_labels = mdp.state_labels;
    chain.action_labels = mdp.action_labels;
    return chain;
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

MdpBuilder& MdpBuilder::initial(int state) {
    initial_ = state;
    return *this;
}

MdpBuilder& MdpBuilder::states(int count) {
    num_states_ = count;
    return *this;
}

MdpBuilder& MdpBuilder::row(int state, int action, double reward,
                            std::vector<std::pair<int, double>> successors) {
    rows_.push_back({state, action, reward, std::move(successors)});
    return *this;
}

MdpBuilder& MdpBuilder::state_label(int state, std::string label) {
    state_labels_.emplace_back(state, std::move(label));
    return *this;
}

MdpBuilder& MdpBuilder::action_label(int action, std::string label) {
    action_labels_.emplace_back(action, std::move(label));
    return *this;
}

Mdp MdpBuilder::finalize() {
    Mdp mdp;
    int max_state = initial_;
    int max_action = -1;
    for (const auto& row : rows_) {
        max_state = std::max(max_state, row.state);
        max_action = std::max(max_action, row.action);
        for (const auto& [succ, prob] : row.succs) {
            (void)prob;
            max_state = std::max(max_state, succ);
        }
    }
    for (const auto& [a, label] : action_labels_) {
        (void)label;
        max_action = std::max(max_action, a);
    }
    mdp.num_states = num_states_ >= 0 ? num_states_ : max_state + 1;
    mdp.num_actions = max_action + 1;
    mdp.initial_state = initial_;

    std::sort(rows_.begin(), rows_.end(), [](const Row& a, const Row& b) {
        return std::tie(a.state, a.action) < std::tie(b.state, b.action);
    });
    for (std::size_t i = 1; i < rows_.size(); ++i)
        if (rows_[i].state == rows_[i - 1].state && rows_[i].action == rows_[i - 1].action)
            throw std::invalid_argument("MdpBuilder: duplicate (state, action) row");

    mdp.pair_begin.assign(mdp.num_states + 1, 0);
    for (const auto& row : rows_)
        mdp.pair_begin[row.state + 1]++;
    for (int s = 0; s < mdp.num_states; ++s)
        mdp.pair_begin[s + 1] += mdp.pair_begin[s];

    mdp.succ_begin.push_back(0);
    for (auto& row : rows_) {
        mdp.pair_state.push_back(row.state);
        mdp.pair_action.push_back(row.action);
        mdp.pair_reward.push_back(row.reward);
        std::sort(row.succs.begin(), row.succs.end());
        for (std::size_t i = 1; i < row.succs.size(); ++i)
            if (row.succs[i].first == row.succs[i - 1].first)
                throw std::invalid_argument("MdpBuilder: duplicate successor in one row");
        for (const auto& [succ, prob] : row.succs) {
            mdp.succ_state.push_back(succ);
            mdp.succ_prob.push_back(prob);
        }
        mdp.succ_begin.push_back(static_cast<int>(mdp.succ_state.size()));
    }

    if (!state_labels_.empty()) {
        mdp.state_labels.assign(mdp.num_states, "");
        for (auto& [s, label] : state_labels_)
            mdp.state_labels[s] = std::move(label);
    }
    if (!action_labels_.empty()) {
        mdp.action_labels.assign(mdp.num_actions, "");
        for (auto& [a, label] : action_labels_)
            mdp.action_labels[a] = std::move(label);
    }
    return mdp;
}

UmdpBuilder& UmdpBuilder::initial(int state) {
    initial_ = state;
    return *this;
}

UmdpBuilder& UmdpBuilder::states(int count) {
    num_states_ = count;
    return *this;
}

UmdpBuilder& UmdpBuilder::row(int state, int action, double reward,
                              std::vector<std::tuple<int, double, double>> successors) {
    rows_.push_back({state, action, reward, std::move(successors)});
    return *this;
}

UncertainMdp UmdpBuilder::finalize() {
    UncertainMdp u;
    int max_state = initial_;
    int max_action = -1;
    for (const auto& row : rows_) {
        max_state = std::max(max_state, row.state);
        max_action = std::max(max_action, row.action);
        for (const auto& succ : row.succs)
            max_state = std::max(max_state, std::get<0>(succ));
    }
    u.num_states = num_states_ >= 0 ? num_states_ : max_state + 1;
    u.num_actions = max_action + 1;
    u.initial_state = initial_;

    std::sort(rows_.begin(), rows_.end(), [](const Row& a, const Row& b) {
        return std::tie(a.state, a.action) < std::tie(b.state, b.action);
    });
    for (std::size_t i = 1; i < rows_.size(); ++i)
        if (rows_[i].state == rows_[i - 1].state && rows_[i].action == rows_[i - 1].action)
            throw std::invalid_argument("UmdpBuilder: duplicate (state, action) row");

    u.pair_begin.assign(u.num_states + 1, 0);
    for (const auto& row : rows_)
        u.pair_begin[row.state + 1]++;
    for (int s = 0; s < u.num_states; ++s)
        u.pair_begin[s + 1] += u.pair_begin[s];

    u.succ_begin.push_back(0);
    for (auto& row : rows_) {
        u.pair_state.push_back(row.state);
        u.pair_action.push_back(row.action);
        u.pair_reward.push_back(row.reward);
        std::sort(row.succs.begin(), row.succs.end(),
                  [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });
        for (std::size_t i = 1; i < row.succs.size(); ++i)
            if (std::get<0>(row.succs[i]) == std::get<0>(row.succs[i - 1]))
                throw std::invalid_argument("UmdpBuilder: duplicate successor in one row");
        for (const auto& [succ, lo, hi] : row.succs) {
            u.succ_state.push_back(succ);
            u.succ_lo.push_back(lo);
            u.succ_hi.push_back(hi);
        }
        u.succ_begin.push_back(static_cast<int>(u.succ_state.size()));
    }
    return u;
}

} // namespace ramdp
