#pragma once

#include "ramdp/model.hpp"

#include <span>
#include <vector>

namespace ramdp {

/// Nature's objective when resolving interval uncertainty.
enum class InnerDirection { AdversarialMin, AdversarialMax };

struct SolveOptions {
    double tolerance = 1e-6;
    int max_iterations = 100000;
};

struct SolveResult {
    std::vector<double> values; // indexed by state; +inf marks divergent reward
    Policy policy;              // deterministic, greedy at the fixed point
    int iterations = 0;
    double residual = 0.0;
};

/// Extreme distribution of a linear objective over the interval-constrained
/// simplex: components start at their lower bounds and the residual mass
/// 1 - sum(lo) is assigned greedily in ascending (AdversarialMin) or
/// descending (AdversarialMax) value order, capped at the upper bounds. Value
/// ties are broken by ascending successor index.
///
/// Requires sum(lo) <= 1 <= sum(hi); throws std::invalid_argument otherwise.
std::vector<double> inner_extreme_distribution(std::span<const double> lower,
                                               std::span<const double> upper,
                                               std::span<const double> values,
                                               InnerDirection direction);

/// Value iteration on an exact MDP (specification semantics must be Exact).
SolveResult exact_value_iteration(const Mdp& mdp, const Specification& spec,
                                  const SolveOptions& options = {});

/// Robust value iteration on an uncertain MDP. Pessimistic semantics lets
/// nature oppose the optimization direction, Optimistic lets it assist.
SolveResult robust_value_iteration(const UncertainMdp& umdp, const Specification& spec,
                                   const SolveOptions& options = {});

/// Value of the Markov chain induced by `policy` at the initial state
/// (specification semantics must be Exact). Solved at tolerance 1e-9.
double evaluate_policy(const Mdp& mdp, const Policy& policy, const Specification& spec);

} // namespace ramdp
