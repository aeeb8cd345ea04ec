#include "ramdp/model.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace ramdp;

namespace {

bool mentions(const ValidationReport& report, const std::string& needle) {
    return report.summary().find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("validate_mdp: uniform two-state model is ok") {
    MdpBuilder builder;
    builder.initial(0).states(2);
    builder.row(0, 0, 0.0, {{1, 0.5}, {0, 0.5}});
    builder.row(1, 0, 0.0, {{1, 1.0}});
    CHECK(validate_mdp(builder.finalize()).ok());
}

TEST_CASE("validate_mdp: probability sum violation names the pair") {
    Mdp mdp;
    mdp.num_states = 2;
    mdp.num_actions = 1;
    mdp.initial_state = 0;
    mdp.pair_begin = {0, 1, 2};
    mdp.pair_state = {0, 1};
    mdp.pair_action = {0, 0};
    mdp.pair_reward = {0.0, 0.0};
    mdp.succ_begin = {0, 2, 3};
    mdp.succ_state = {0, 1, 1};
    mdp.succ_prob = {0.5, 0.6, 1.0};
    const auto report = validate_mdp(mdp);
    CHECK_FALSE(report.ok());
    CHECK(mentions(report, "sum 1.1"));
    CHECK(mentions(report, "(s0,a0)"));
}

TEST_CASE("validate_mdp: state without actions is a violation") {
    Mdp mdp;
    mdp.num_states = 2;
    mdp.num_actions = 1;
    mdp.initial_state = 0;
    mdp.pair_begin = {0, 1, 1}; // s1 has no pairs
    mdp.pair_state = {0};
    mdp.pair_action = {0};
    mdp.pair_reward = {0.0};
    mdp.succ_begin = {0, 1};
    mdp.succ_state = {1};
    mdp.succ_prob = {1.0};
    const auto report = validate_mdp(mdp);
    CHECK_FALSE(report.ok());
    CHECK(mentions(report, "no enabled action at s1"));
}

TEST_CASE("validate_umdp: feasible interval set is ok") {
    UmdpBuilder builder;
    builder.initial(0).states(2);
    builder.row(0, 0, 0.0, {{0, 0.2, 0.4}, {1, 0.6, 0.8}});
    builder.row(1, 0, 0.0, {{1, 1.0, 1.0}});
    CHECK(validate_umdp(builder.finalize()).ok());
}

TEST_CASE("validate_umdp: lower bounds exceeding mass 1 are flagged") {
    UmdpBuilder builder;
    builder.initial(0).states(2);
    builder.row(0, 0, 0.0, {{0, 0.6, 0.7}, {1, 0.5, 0.6}});
    builder.row(1, 0, 0.0, {{1, 1.0, 1.0}});
    const auto report = validate_umdp(builder.finalize());
    CHECK_FALSE(report.ok());
    CHECK(mentions(report, "lower sum 1.1"));
}

TEST_CASE("validate_umdp: zero lower bound is flagged") {
    UmdpBuilder builder;
    builder.initial(0).states(2);
    builder.row(0, 0, 0.0, {{0, 0.0, 0.3}, {1, 0.7, 1.0}});
    builder.row(1, 0, 0.0, {{1, 1.0, 1.0}});
    const auto report = validate_umdp(builder.finalize());
    CHECK_FALSE(report.ok());
    CHECK(mentions(report, "zero lower bound"));
}

TEST_CASE("initial_prior_umdp: branching transitions get [eps, 1-eps], self-loops [1,1]") {
    const Mdp mdp = testsupport::example_mdp();
    const PriorUmdp prior = initial_prior_umdp(mdp, 1e-4, {5, 10});
    REQUIRE(prior.umdp.transition_count() == 7);

    int wide = 0, point = 0;
    for (int t = 0; t < prior.umdp.transition_count(); ++t) {
        if (prior.umdp.is_point_one(t)) {
            ++point;
            CHECK(prior.strengths[t].lo == 0);
        } else {
            ++wide;
            CHECK(prior.umdp.succ_lo[t] == doctest::Approx(1e-4));
            CHECK(prior.umdp.succ_hi[t] == doctest::Approx(0.9999));
            CHECK(prior.strengths[t].lo == 5);
            CHECK(prior.strengths[t].hi == 10);
        }
    }
    CHECK(wide == 4);
    CHECK(point == 3);
    CHECK(validate_umdp(prior.umdp).ok());
    CHECK(same_support(mdp, prior.umdp));
}

TEST_CASE("initial_prior_umdp: epsilon 0.5 is rejected") {
    CHECK_THROWS_AS(initial_prior_umdp(testsupport::example_mdp(), 0.5, {5, 10}),
                    std::invalid_argument);
}

TEST_CASE("initial_prior_umdp: deterministic chain keeps point intervals only") {
    MdpBuilder builder;
    builder.initial(0).states(3);
    builder.row(0, 0, 0.0, {{1, 1.0}});
    builder.row(1, 0, 0.0, {{2, 1.0}});
    builder.row(2, 0, 0.0, {{2, 1.0}});
    const PriorUmdp prior = initial_prior_umdp(builder.finalize(), 1e-4, {5, 10});
    for (int t = 0; t < prior.umdp.transition_count(); ++t)
        CHECK(prior.umdp.is_point_one(t));
}

TEST_CASE("classify_states: example MDP, target s1") {
    const Mdp mdp = testsupport::example_mdp();
    const auto cls = classify_states(mdp, testsupport::reach_s1_max());
    CHECK(cls.prob1[1]);
    CHECK(cls.prob0[2]);
    CHECK(cls.prob0[3]);
    CHECK_FALSE(cls.prob0[0]);
    CHECK_FALSE(cls.prob1[0]); // best probability is 0.7 < 1
}

TEST_CASE("classify_states: all states target") {
    const Mdp mdp = testsupport::example_mdp();
    Specification spec{SpecKind::Reach, {0, 1, 2, 3}, {}, Direction::Max, Semantics::Exact};
    const auto cls = classify_states(mdp, spec);
    for (int s = 0; s < 4; ++s)
        CHECK(cls.prob1[s]);
}

TEST_CASE("classify_states: permuting state indices permutes the classification") {
    const Mdp mdp = testsupport::example_mdp();
    // Permutation pi: old -> new
    const std::vector<int> pi = {2, 0, 3, 1};
    MdpBuilder builder;
    builder.initial(pi[0]).states(4);
    for (int p = 0; p < mdp.pair_count(); ++p) {
        std::vector<std::pair<int, double>> succs;
        for (int t = mdp.succ_begin[p]; t < mdp.succ_begin[p + 1]; ++t)
            succs.emplace_back(pi[mdp.succ_state[t]], mdp.succ_prob[t]);
        builder.row(pi[mdp.pair_state[p]], mdp.pair_action[p], mdp.pair_reward[p],
                    std::move(succs));
    }
    const Mdp permuted = builder.finalize();

    Specification spec = testsupport::reach_s1_max();
    Specification permuted_spec = spec;
    permuted_spec.targets = {pi[1]};

    const auto original = classify_states(mdp, spec);
    const auto mapped = classify_states(permuted, permuted_spec);
    for (int s = 0; s < 4; ++s) {
        CHECK(original.prob0[s] == mapped.prob0[pi[s]]);
        CHECK(original.prob1[s] == mapped.prob1[pi[s]]);
    }
}

TEST_CASE("classify_states: reach-avoid treats avoid states as absorbing") {
    // s0 -> s1 -> s2(target); s1 is avoided, so the target is unreachable.
    MdpBuilder builder;
    builder.initial(0).states(3);
    builder.row(0, 0, 0.0, {{1, 1.0}});
    builder.row(1, 0, 0.0, {{2, 1.0}});
    builder.row(2, 0, 0.0, {{2, 1.0}});
    Specification spec{SpecKind::ReachAvoid, {2}, {1}, Direction::Max, Semantics::Exact};
    const auto cls = classify_states(builder.finalize(), spec);
    CHECK(cls.prob0[0]);
    CHECK(cls.prob0[1]);
    CHECK(cls.prob1[2]);
}

TEST_CASE("induce_markov_chain: deterministic choice keeps the chosen row") {
    const Mdp mdp = testsupport::example_mdp();
    Policy policy;
    policy.deterministic = true;
    policy.choice = {0, 0, 0, 0};
    const Mdp chain = induce_markov_chain(mdp, policy);
    CHECK(validate_mdp(chain).ok());
    REQUIRE(chain.pair_begin[1] - chain.pair_begin[0] == 1);
    const int pair = chain.pair_begin[0];
    REQUIRE(chain.succ_begin[pair + 1] - chain.succ_begin[pair] == 2);
    CHECK(chain.succ_state[chain.succ_begin[pair]] == 1);
    CHECK(chain.succ_prob[chain.succ_begin[pair]] == doctest::Approx(0.7));
}

TEST_CASE("induce_markov_chain: uniform mixture merges successor mass") {
    const Mdp mdp = testsupport::example_mdp();
    Policy policy;
    policy.deterministic = false;
    policy.pair_weight.assign(mdp.pair_count(), 0.0);
    policy.pair_weight[0] = 0.5; // (s0, a0)
    policy.pair_weight[1] = 0.5; // (s0, a1)
    for (int s = 1; s < 4; ++s)
        policy.pair_weight[mdp.pair_begin[s]] = 1.0;
    const Mdp chain = induce_markov_chain(mdp, policy);
    CHECK(validate_mdp(chain).ok());
    // P(s0 -> s2) = 0.5*0.3 + 0.5*0.1 = 0.2
    const int pair = chain.pair_begin[0];
    bool found = false;
    for (int t = chain.succ_begin[pair]; t < chain.succ_begin[pair + 1]; ++t)
        if (chain.succ_state[t] == 2) {
            CHECK(chain.succ_prob[t] == doctest::Approx(0.2));
            found = true;
        }
    CHECK(found);
}

TEST_CASE("induce_markov_chain: single-action model is unchanged") {
    MdpBuilder builder;
    builder.initial(0).states(2);
    builder.row(0, 0, 1.5, {{1, 0.9}, {0, 0.1}});
    builder.row(1, 0, 0.0, {{1, 1.0}});
    const Mdp mdp = builder.finalize();
    Policy policy;
    policy.deterministic = true;
    policy.choice = {0, 0};
    const Mdp chain = induce_markov_chain(mdp, policy);
    CHECK(chain.succ_prob == mdp.succ_prob);
    CHECK(chain.succ_state == mdp.succ_state);
    CHECK(chain.pair_reward == mdp.pair_reward);
}

TEST_CASE("induce_markov_chain: mass is preserved for random mixtures") {
    const Mdp mdp = testsupport::example_mdp();
    for (double w = 0.0; w <= 1.0; w += 0.125) {
        Policy policy;
        policy.deterministic = false;
        policy.pair_weight.assign(mdp.pair_count(), 0.0);
        policy.pair_weight[0] = w;
        policy.pair_weight[1] = 1.0 - w;
        for (int s = 1; s < 4; ++s)
            policy.pair_weight[mdp.pair_begin[s]] = 1.0;
        const Mdp chain = induce_markov_chain(mdp, policy);
        for (int p = 0; p < chain.pair_count(); ++p) {
            double sum = 0.0;
            for (int t = chain.succ_begin[p]; t < chain.succ_begin[p + 1]; ++t)
                sum += chain.succ_prob[t];
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("induce_markov_chain: disabled action is an error") {
    const Mdp mdp = testsupport::example_mdp();
    Policy policy;
    policy.deterministic = true;
    policy.choice = {1, 1, 0, 0}; // a1 not enabled at s1
    CHECK_THROWS_AS(induce_markov_chain(mdp, policy), std::invalid_argument);
}
