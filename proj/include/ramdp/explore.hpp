#pragma once

#include "ramdp/learners.hpp"
#include "ramdp/model.hpp"
#include "ramdp/rng.hpp"
#include "ramdp/solver.hpp"

#include <algorithm>
#include <cstdint>
#include <memory>

namespace ramdp {

// ---------------------------------------------------------------------------
// Sampling access to the true MDP. Learners never see the oracle; they only
// receive counts, which enforces the black-box access of the learning loop.
// ---------------------------------------------------------------------------

class SamplingOracle {
  public:
    virtual ~SamplingOracle() = default;

    /// Known support graph (states, enabled actions, successor sets, rewards).
    virtual const Mdp& graph() const = 0;

    /// The environment the next trajectory is drawn from.
    virtual const Mdp& current_mdp() const = 0;

    virtual void on_trajectory_start() {}

    /// Draws a successor of `pair` and returns its transition id.
    int sample_transition(int pair, Rng& rng);
};

/// Fixed environment.
class FixedOracle : public SamplingOracle {
  public:
    explicit FixedOracle(Mdp mdp) : mdp_(std::move(mdp)) {}
    const Mdp& graph() const override { return mdp_; }
    const Mdp& current_mdp() const override { return mdp_; }

  private:
    Mdp mdp_;
};

/// Serves env_a for the first `switch_after` started trajectories, env_b
/// afterwards; the switch is invisible to the learner. Both environments must
/// share their support.
class SwitchingOracle : public SamplingOracle {
  public:
    SwitchingOracle(Mdp env_a, Mdp env_b, std::int64_t switch_after);
    const Mdp& graph() const override { return env_a_; }
    const Mdp& current_mdp() const override {
        // Trajectory k (1-based) runs on env_a iff k <= switch_after; between
        // trajectories this reports the environment of the latest one.
        return std::max<std::int64_t>(started_, 1) <= switch_after_ ? env_a_ : env_b_;
    }
    void on_trajectory_start() override { ++started_; }

  private:
    Mdp env_a_, env_b_;
    std::int64_t switch_after_ = 0;
    std::int64_t started_ = 0;
};

// ---------------------------------------------------------------------------
// Trajectories and the doubling-counting schedule
// ---------------------------------------------------------------------------

struct Trajectory {
    enum class End { TargetReached, AbsorbingNonTarget, HorizonH };
    struct Step {
        int state;
        int action;
        int successor;
        int pair;       // pair id in the support graph
        int transition; // transition id in the support graph
    };
    std::vector<Step> steps;
    End terminated_by = End::HorizonH;
};

struct ScheduleState {
    CountTable global;    // all completed iterations
    CountTable iteration; // current iteration, merged out at the boundary
    std::int64_t trajectories_done = 0;

    ScheduleState() = default;
    explicit ScheduleState(const Mdp& graph) : global(graph), iteration(graph) {}
};

/// Greedy policy for the optimistic extension of `spec` (nature assists the
/// optimization direction), driving exploration.
Policy optimistic_policy(const UncertainMdp& umdp, const Specification& spec,
                         const SolveOptions& options = {});

/// Follows the deterministic input with probability xi and spreads 1 - xi
/// uniformly over the other enabled actions; single-action states keep
/// probability 1.
template <typename Model>
Policy randomize_policy(const Model& model, const Policy& policy, double xi);

/// Uniform distribution over the enabled actions of every state.
Policy uniform_policy(const Mdp& model);

/// Walks from the initial state, drawing actions from the policy and
/// successors from the oracle. The trajectory ends on entering a target, a
/// restart state (probability-zero or reward-divergent states from the
/// classification), or after `horizon` steps.
Trajectory sample_trajectory(SamplingOracle& oracle, const Policy& policy,
                             const Specification& spec,
                             const StateClassification& classification, int horizon,
                             Rng& rng);

/// Samples trajectories into the iteration counters until some counter visited
/// this iteration reaches its pre-iteration total (the doubling condition) or
/// the trajectory budget runs out, then merges the iteration into the global
/// table and returns the merged-out counts. Always samples at least one
/// trajectory. With `doubling_on_transitions` the condition checks transition
/// counters instead of pair counters.
CountTable run_iteration(ScheduleState& schedule, SamplingOracle& oracle,
                         const Policy& policy, const Specification& spec,
                         const StateClassification& classification, int horizon,
                         std::int64_t budget_remaining, Rng& rng,
                         bool doubling_on_transitions = false);

} // namespace ramdp
