#include "ramdp/solver.hpp"

#include "ramdp/environments.hpp"
#include "ramdp/rng.hpp"
#include "support.hpp"

#include <tuple>

#include <doctest.h>

#include <cmath>

using namespace ramdp;

TEST_CASE("inner_extreme_distribution: worked example, adversarial min") {
    const std::vector<double> lo = {0.1, 0.2, 0.1};
    const std::vector<double> hi = {0.5, 0.6, 0.4};
    const std::vector<double> values = {0.0, 10.0, 5.0};
    const auto p = inner_extreme_distribution(lo, hi, values, InnerDirection::AdversarialMin);
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.2));
    CHECK(p[2] == doctest::Approx(0.3));
    const double objective = p[0] * 0.0 + p[1] * 10.0 + p[2] * 5.0;
    CHECK(objective == doctest::Approx(3.5));
}

TEST_CASE("inner_extreme_distribution: worked example, adversarial max") {
    const std::vector<double> lo = {0.1, 0.2, 0.1};
    const std::vector<double> hi = {0.5, 0.6, 0.4};
    const std::vector<double> values = {0.0, 10.0, 5.0};
    const auto p = inner_extreme_distribution(lo, hi, values, InnerDirection::AdversarialMax);
    CHECK(p[0] == doctest::Approx(0.1));
    CHECK(p[1] == doctest::Approx(0.6));
    CHECK(p[2] == doctest::Approx(0.3));
    const double objective = p[1] * 10.0 + p[2] * 5.0;
    CHECK(objective == doctest::Approx(7.5));
}

TEST_CASE("inner_extreme_distribution: forced point interval") {
    const std::vector<double> lo = {1.0}, hi = {1.0}, values = {3.25};
    const auto p = inner_extreme_distribution(lo, hi, values, InnerDirection::AdversarialMin);
    REQUIRE(p.size() == 1);
    CHECK(p[0] == doctest::Approx(1.0));
}

TEST_CASE("inner_extreme_distribution: infeasible interval set throws") {
    const std::vector<double> lo = {0.6, 0.5}, hi = {0.7, 0.6}, values = {0.0, 1.0};
    CHECK_THROWS_AS(inner_extreme_distribution(lo, hi, values, InnerDirection::AdversarialMin),
                    std::invalid_argument);
}

namespace {

// Random feasible interval/value instances; wide intervals for m=2, narrower
// as m grows to keep the grid oracle tractable.
struct InnerInstance {
    std::vector<double> lo, hi, values;
};

InnerInstance random_instance(Rng& rng, int m) {
    InnerInstance inst;
    while (true) {
        inst.lo.clear();
        inst.hi.clear();
        double lo_sum = 0.0, hi_sum = 0.0;
        const double max_width = m == 2 ? 0.9 : 0.2;
        for (int i = 0; i < m; ++i) {
            const double lo = 0.01 + rng.next_unit() * 0.5;
            const double width = 0.01 + rng.next_unit() * max_width;
            const double hi = std::min(1.0, lo + width);
            inst.lo.push_back(lo);
            inst.hi.push_back(hi);
            lo_sum += lo;
            hi_sum += hi;
        }
        if (lo_sum <= 1.0 && hi_sum >= 1.0)
            break;
    }
    // Values on the scale of reachability backups: the grid oracle's
    // quantization error stays well under the comparison gap.
    for (int i = 0; i < m; ++i)
        inst.values.push_back(rng.next_unit());
    return inst;
}

double objective_of(const std::vector<double>& p, const std::vector<double>& values) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        sum += p[i] * values[i];
    return sum;
}

} // namespace

TEST_CASE("inner_extreme_distribution: agrees with the grid-search oracle") {
    Rng rng(2024);
    for (int round = 0; round < 60; ++round) {
        const int m = 2 + static_cast<int>(rng.next_u64() % 3);
        const auto inst = random_instance(rng, m);
        for (const bool maximize : {false, true}) {
            const auto dir = maximize ? InnerDirection::AdversarialMax
                                      : InnerDirection::AdversarialMin;
            const auto p = inner_extreme_distribution(inst.lo, inst.hi, inst.values, dir);
            double mass = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                REQUIRE(p[i] >= inst.lo[i] - 1e-12);
                REQUIRE(p[i] <= inst.hi[i] + 1e-12);
                mass += p[i];
            }
            REQUIRE(mass == doctest::Approx(1.0).epsilon(1e-9));
            const auto oracle = testsupport::grid_search_extreme(inst.lo, inst.hi, inst.values,
                                                                 maximize, 1e-3);
            REQUIRE(oracle.feasible);
            CHECK(std::abs(objective_of(p, inst.values) - oracle.objective) < 1e-3);
        }
    }
}

TEST_CASE("inner_extreme_distribution: agrees with vertex enumeration on wide intervals") {
    Rng rng(77);
    for (int round = 0; round < 200; ++round) {
        const int m = 2 + static_cast<int>(rng.next_u64() % 3);
        InnerInstance inst;
        while (true) {
            inst.lo.clear();
            inst.hi.clear();
            double lo_sum = 0.0, hi_sum = 0.0;
            for (int i = 0; i < m; ++i) {
                const double lo = 0.01 + rng.next_unit() * 0.4;
                const double hi = std::min(1.0, lo + rng.next_unit() * 0.9);
                inst.lo.push_back(lo);
                inst.hi.push_back(hi);
                lo_sum += lo;
                hi_sum += hi;
            }
            if (lo_sum <= 1.0 && hi_sum >= 1.0)
                break;
        }
        inst.values.clear();
        for (int i = 0; i < m; ++i)
            inst.values.push_back(rng.next_unit() * 10.0);

        for (const bool maximize : {false, true}) {
            const auto dir = maximize ? InnerDirection::AdversarialMax
                                      : InnerDirection::AdversarialMin;
            const auto p = inner_extreme_distribution(inst.lo, inst.hi, inst.values, dir);
            const auto oracle = testsupport::vertex_extreme(inst.lo, inst.hi, inst.values,
                                                            maximize);
            REQUIRE(oracle.feasible);
            CHECK(objective_of(p, inst.values) ==
                  doctest::Approx(oracle.objective).epsilon(1e-9));
        }
    }
}

TEST_CASE("exact_value_iteration: example MDP reaches s1 with 0.7") {
    const Mdp mdp = testsupport::example_mdp();
    const auto result = exact_value_iteration(mdp, testsupport::reach_s1_max());
    CHECK(std::abs(result.values[0] - 0.7) <= 1e-9);
    CHECK(result.policy.choice[0] == 0);
    CHECK(result.values[1] == doctest::Approx(1.0));
    CHECK(result.values[2] == doctest::Approx(0.0));
    CHECK(result.residual <= 1e-6);
}

TEST_CASE("exact_value_iteration: bandit optimum is the best arm") {
    const Environment bandit = build_bandit();
    const auto result = exact_value_iteration(bandit.mdp, bandit.spec);
    CHECK(std::abs(result.values[bandit.mdp.initial_state] - 0.99) <= 1e-6);
    CHECK(result.policy.choice[0] == 98); // arm with success probability 0.99
}

TEST_CASE("exact_value_iteration: chain min-reward matches the linear-system oracle") {
    const Environment chain = build_chain(30);
    SolveOptions options;
    options.tolerance = 1e-10;
    const auto result = exact_value_iteration(chain.mdp, chain.spec, options);

    const Mdp induced = induce_markov_chain(chain.mdp, result.policy);
    const auto oracle = testsupport::chain_expected_reward(induced, chain.spec.targets);
    CHECK(std::abs(result.values[0] - oracle[0]) <= 1e-6);
    // The optimal policy takes the reliable forward action everywhere.
    for (int s = 0; s + 1 < 30; ++s)
        CHECK(result.policy.choice[s] == 0);
}

TEST_CASE("robust_value_iteration: pessimistic value of the intermediate uMDP") {
    const UncertainMdp umdp = testsupport::example_umdp();
    Specification spec = testsupport::reach_s1_max().with_semantics(Semantics::Pessimistic);
    const auto result = robust_value_iteration(umdp, spec);
    // Nature pushes mass away from s1: p(s1) = max(0.6, 1 - 0.33) = 0.67.
    // Cross-checked by corner enumeration below.
    const auto corner = testsupport::vertex_extreme({0.6, 0.25}, {0.8, 0.33}, {1.0, 0.0},
                                                    /*maximize=*/false);
    CHECK(result.values[0] == doctest::Approx(corner.objective).epsilon(1e-9));
    CHECK(result.values[0] == doctest::Approx(0.67));

    const auto optimistic =
        robust_value_iteration(umdp, spec.with_semantics(Semantics::Optimistic));
    CHECK(optimistic.values[0] == doctest::Approx(0.75)); // min(0.8, 1 - 0.25)
}

TEST_CASE("robust_value_iteration: point intervals reduce to the exact solution") {
    const Environment chain = build_chain(5);
    // Point-interval uMDP carrying the true probabilities.
    UmdpBuilder builder;
    builder.initial(0).states(chain.mdp.num_states);
    for (int p = 0; p < chain.mdp.pair_count(); ++p) {
        std::vector<std::tuple<int, double, double>> succs;
        for (int t = chain.mdp.succ_begin[p]; t < chain.mdp.succ_begin[p + 1]; ++t)
            succs.emplace_back(chain.mdp.succ_state[t], chain.mdp.succ_prob[t],
                               chain.mdp.succ_prob[t]);
        builder.row(chain.mdp.pair_state[p], chain.mdp.pair_action[p],
                    chain.mdp.pair_reward[p], std::move(succs));
    }
    const UncertainMdp umdp = builder.finalize();

    const auto exact = exact_value_iteration(chain.mdp, chain.spec);
    for (const auto semantics : {Semantics::Pessimistic, Semantics::Optimistic}) {
        const auto robust = robust_value_iteration(umdp, chain.spec.with_semantics(semantics));
        for (int s = 0; s < chain.mdp.num_states; ++s)
            CHECK(robust.values[s] == doctest::Approx(exact.values[s]).epsilon(1e-6));
        CHECK(robust.policy.choice == exact.policy.choice);
    }
}

TEST_CASE("robust_value_iteration: pessimistic <= optimistic for max specs") {
    const Mdp graph = testsupport::example_mdp();
    const UncertainMdp prior = initial_prior_umdp(graph, 1e-4, {5, 10}).umdp;
    const Specification spec = testsupport::reach_s1_max();
    const auto pess = robust_value_iteration(prior, spec.with_semantics(Semantics::Pessimistic));
    const auto opt = robust_value_iteration(prior, spec.with_semantics(Semantics::Optimistic));
    for (int s = 0; s < graph.num_states; ++s)
        CHECK(pess.values[s] <= opt.values[s] + 1e-12);
}

TEST_CASE("robust_value_iteration: truth-containing intervals give conservative values") {
    // For max-direction specs, the pessimistic value promises no more than the
    // extracted policy actually achieves on any contained instance.
    const Mdp truth = testsupport::example_mdp();
    const Specification spec = testsupport::reach_s1_max();
    Rng rng(404);
    for (int round = 0; round < 50; ++round) {
        UmdpBuilder builder;
        builder.initial(0).states(truth.num_states);
        for (int p = 0; p < truth.pair_count(); ++p) {
            std::vector<std::tuple<int, double, double>> succs;
            const bool point = truth.succ_begin[p + 1] - truth.succ_begin[p] == 1;
            for (int t = truth.succ_begin[p]; t < truth.succ_begin[p + 1]; ++t) {
                const double prob = truth.succ_prob[t];
                if (point) {
                    succs.emplace_back(truth.succ_state[t], 1.0, 1.0);
                } else {
                    const double lo = std::max(1e-4, prob - rng.next_unit() * 0.2);
                    const double hi = std::min(1.0, prob + rng.next_unit() * 0.2);
                    succs.emplace_back(truth.succ_state[t], lo, hi);
                }
            }
            builder.row(truth.pair_state[p], truth.pair_action[p], truth.pair_reward[p],
                        std::move(succs));
        }
        const auto robust = robust_value_iteration(builder.finalize(),
                                                   spec.with_semantics(Semantics::Pessimistic));
        const double actual = evaluate_policy(truth, robust.policy, spec);
        CHECK(robust.values[truth.initial_state] <= actual + 1e-9);
    }
}

TEST_CASE("value iteration: reachability sweeps are monotone from zero") {
    const Mdp graph = testsupport::example_mdp();
    const UncertainMdp prior = initial_prior_umdp(graph, 1e-4, {5, 10}).umdp;
    const Specification spec =
        testsupport::reach_s1_max().with_semantics(Semantics::Pessimistic);
    std::vector<double> previous(graph.num_states, 0.0);
    for (int sweeps = 1; sweeps <= 8; ++sweeps) {
        SolveOptions options;
        options.tolerance = 0.0; // force exactly `sweeps` sweeps
        options.max_iterations = sweeps;
        const auto result = robust_value_iteration(prior, spec, options);
        for (int s = 0; s < graph.num_states; ++s) {
            CHECK(result.values[s] >= previous[s] - 1e-12);
        }
        previous = result.values;
    }
}

TEST_CASE("robust_value_iteration: successor order does not change values") {
    // Same uMDP built with reversed row order; builders canonicalize, so the
    // values must agree bit-for-bit with the straight build.
    UmdpBuilder reversed;
    reversed.initial(0).states(4);
    reversed.row(3, 0, 0.0, {{3, 1.0, 1.0}});
    reversed.row(2, 0, 0.0, {{2, 1.0, 1.0}});
    reversed.row(1, 0, 0.0, {{1, 1.0, 1.0}});
    reversed.row(0, 1, 0.0, {{3, 0.8, 1.0}, {2, 0.2, 0.4}});
    reversed.row(0, 0, 0.0, {{2, 0.25, 0.33}, {1, 0.6, 0.8}});
    const Specification spec =
        testsupport::reach_s1_max().with_semantics(Semantics::Pessimistic);
    const auto a = robust_value_iteration(testsupport::example_umdp(), spec);
    const auto b = robust_value_iteration(reversed.finalize(), spec);
    CHECK(a.values == b.values);
    CHECK(a.policy.choice == b.policy.choice);
}

TEST_CASE("evaluate_policy: re-evaluating the optimal policy is consistent") {
    const Environment chain = build_chain(30);
    const auto result = exact_value_iteration(chain.mdp, chain.spec);
    const double value = evaluate_policy(chain.mdp, result.policy, chain.spec);
    CHECK(value == doctest::Approx(result.values[0]).epsilon(1e-6));
}

TEST_CASE("evaluate_policy: always-bet-zero earns exactly the starting coins") {
    const Environment betting = build_betting_game(0.8);
    Policy policy;
    policy.deterministic = true;
    policy.choice.assign(betting.mdp.num_states, 0); // bet0 / collect / stay
    CHECK(evaluate_policy(betting.mdp, policy, betting.spec) == doctest::Approx(10.0));
}

TEST_CASE("evaluate_policy: uniform policy on the example MDP") {
    const Mdp mdp = testsupport::example_mdp();
    Policy policy;
    policy.deterministic = false;
    policy.pair_weight.assign(mdp.pair_count(), 0.0);
    policy.pair_weight[0] = 0.5;
    policy.pair_weight[1] = 0.5;
    for (int s = 1; s < 4; ++s)
        policy.pair_weight[mdp.pair_begin[s]] = 1.0;
    CHECK(evaluate_policy(mdp, policy, testsupport::reach_s1_max()) ==
          doctest::Approx(0.35));
}

TEST_CASE("exact_value_iteration: divergent expected reward is reported as infinity") {
    // A state that can only loop forever never reaches the target.
    MdpBuilder builder;
    builder.initial(0).states(3);
    builder.row(0, 0, 1.0, {{1, 0.5}, {2, 0.5}});
    builder.row(1, 0, 1.0, {{1, 1.0}}); // dead loop
    builder.row(2, 0, 0.0, {{2, 1.0}}); // target
    const Mdp mdp = builder.finalize();
    Specification spec{SpecKind::ExpectedReward, {2}, {}, Direction::Min, Semantics::Exact};
    const auto result = exact_value_iteration(mdp, spec);
    CHECK(std::isinf(result.values[0]));
    CHECK(std::isinf(result.values[1]));
    CHECK(result.values[2] == doctest::Approx(0.0));
}
