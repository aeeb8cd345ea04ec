#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ramdp {

/// Probability sums are accepted within this tolerance everywhere.
inline constexpr double kProbTolerance = 1e-9;

// ---------------------------------------------------------------------------
// Core models. States and actions are dense integer indices; enabled actions
// and successor lists are stored in CSR form:
//
//   pair p in [pair_begin[s], pair_begin[s+1])   one enabled (state, action)
//   transition t in [succ_begin[p], succ_begin[p+1])   one supported successor
//
// Both models share the structural arrays so graph analysis, counters and
// learners can index either one uniformly.
// ---------------------------------------------------------------------------

struct Mdp {
    int num_states = 0;
    int num_actions = 0; // distinct global action ids
    int initial_state = 0;

    std::vector<int> pair_begin;     // size num_states + 1
    std::vector<int> pair_state;     // size P: owning state of each pair
    std::vector<int> pair_action;    // size P: global action id
    std::vector<double> pair_reward; // size P

    std::vector<int> succ_begin;   // size P + 1
    std::vector<int> succ_state;   // size T
    std::vector<double> succ_prob; // size T

    std::vector<std::string> state_labels;  // optional, empty or size num_states
    std::vector<std::string> action_labels; // optional, empty or size num_actions

    int pair_count() const { return static_cast<int>(pair_action.size()); }
    int transition_count() const { return static_cast<int>(succ_state.size()); }

    // Pair ids of a state are contiguous: [pair_begin[s], pair_begin[s+1]).
    int first_pair(int state) const { return pair_begin[state]; }
    int end_pair(int state) const { return pair_begin[state + 1]; }

    /// Pair id of (state, action), or -1 when the action is not enabled.
    int find_pair(int state, int action) const;

    std::span<const int> successors(int pair) const {
        return {succ_state.data() + succ_begin[pair],
                static_cast<std::size_t>(succ_begin[pair + 1] - succ_begin[pair])};
    }
    std::span<const double> probabilities(int pair) const {
        return {succ_prob.data() + succ_begin[pair],
                static_cast<std::size_t>(succ_begin[pair + 1] - succ_begin[pair])};
    }
};

struct UncertainMdp {
    int num_states = 0;
    int num_actions = 0;
    int initial_state = 0;

    std::vector<int> pair_begin;
    std::vector<int> pair_state;
    std::vector<int> pair_action;
    std::vector<double> pair_reward;

    std::vector<int> succ_begin;
    std::vector<int> succ_state;
    std::vector<double> succ_lo;
    std::vector<double> succ_hi;

    std::vector<std::string> state_labels;
    std::vector<std::string> action_labels;

    int pair_count() const { return static_cast<int>(pair_action.size()); }
    int transition_count() const { return static_cast<int>(succ_state.size()); }
    int first_pair(int state) const { return pair_begin[state]; }
    int end_pair(int state) const { return pair_begin[state + 1]; }
    int find_pair(int state, int action) const;

    std::span<const int> successors(int pair) const {
        return {succ_state.data() + succ_begin[pair],
                static_cast<std::size_t>(succ_begin[pair + 1] - succ_begin[pair])};
    }
    std::span<const double> lower_bounds(int pair) const {
        return {succ_lo.data() + succ_begin[pair],
                static_cast<std::size_t>(succ_begin[pair + 1] - succ_begin[pair])};
    }
    std::span<const double> upper_bounds(int pair) const {
        return {succ_hi.data() + succ_begin[pair],
                static_cast<std::size_t>(succ_begin[pair + 1] - succ_begin[pair])};
    }

    /// Point interval [1,1]: immutable under every learner (known graph
    /// assumption assigns these exactly).
    bool is_point_one(int transition) const {
        return succ_lo[transition] == 1.0 && succ_hi[transition] == 1.0;
    }
};

// ---------------------------------------------------------------------------
// Specifications and policies
// ---------------------------------------------------------------------------

enum class SpecKind { Reach, ReachAvoid, ExpectedReward };
enum class Direction { Max, Min };
enum class Semantics { Exact, Optimistic, Pessimistic };

struct Specification {
    SpecKind kind = SpecKind::Reach;
    std::vector<int> targets; // nonempty, sorted
    std::vector<int> avoid;   // empty unless ReachAvoid; disjoint from targets
    Direction direction = Direction::Max;
    Semantics semantics = Semantics::Exact;

    Specification with_semantics(Semantics s) const {
        Specification copy = *this;
        copy.semantics = s;
        return copy;
    }
    bool is_target(int state) const;
    bool is_avoid(int state) const;
};

struct Policy {
    bool deterministic = true;

    /// Deterministic: global action id per state.
    std::vector<int> choice;

    /// Randomized: weight per pair id of the model the policy was built for;
    /// weights of one state's pairs sum to 1.
    std::vector<double> pair_weight;
};

struct StateClassification {
    std::vector<bool> prob0;            // target reached with probability 0
    std::vector<bool> prob1;            // target reached with probability 1
    std::vector<bool> reward_divergent; // expected reward infinite
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
    int state = -1;
    int action = -1;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string summary() const;
};

ValidationReport validate_mdp(const Mdp& mdp);
ValidationReport validate_umdp(const UncertainMdp& umdp);

/// True when both models have identical states, enabled actions, rewards and
/// successor sets (probabilities/intervals are not compared).
bool same_support(const Mdp& mdp, const UncertainMdp& umdp);
bool same_support(const Mdp& a, const Mdp& b);

// ---------------------------------------------------------------------------
// Prior construction and policy application
// ---------------------------------------------------------------------------

/// LUI bookkeeping attached to one uncertain transition.
struct StrengthInterval {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};

struct PriorUmdp {
    UncertainMdp umdp;
    /// Per-transition strength intervals; {0,0} on immutable [1,1] points.
    std::vector<StrengthInterval> strengths;
};

/// Builds the initial prior from the support of `graph_source`: probability-1
/// transitions become [1,1], every other supported transition becomes
/// [epsilon, 1-epsilon] with the given strength interval. Probabilities of the
/// source are not copied, only its graph is read.
PriorUmdp initial_prior_umdp(const Mdp& graph_source, double epsilon,
                             StrengthInterval strength);

/// Applies a policy, producing a Markov chain as an Mdp with one enabled
/// action per state (randomized policies yield the mixture distribution).
Mdp induce_markov_chain(const Mdp& mdp, const Policy& policy);

/// Graph-based qualitative analysis on the support (probabilities ignored).
/// For ReachAvoid, avoid states are treated as absorbing. The prob0/prob1
/// quantification follows the specification's direction; reward_divergent is
/// filled for ExpectedReward specifications and empty otherwise.
StateClassification classify_states(const Mdp& mdp, const Specification& spec);
StateClassification classify_states(const UncertainMdp& umdp, const Specification& spec);

// ---------------------------------------------------------------------------
// Builders: collect (state, action) rows in any order, finalize() sorts by
// (state, action id) and successor lists by successor state id.
// ---------------------------------------------------------------------------

class MdpBuilder {
  public:
    MdpBuilder& initial(int state);
    MdpBuilder& states(int count); // optional; otherwise max index + 1
    MdpBuilder& row(int state, int action, double reward,
                    std::vector<std::pair<int, double>> successors);
    MdpBuilder& state_label(int state, std::string label);
    MdpBuilder& action_label(int action, std::string label);
    Mdp finalize();

  private:
    struct Row {
        int state;
        int action;
        double reward;
        std::vector<std::pair<int, double>> succs;
    };
    std::vector<Row> rows_;
    std::vector<std::pair<int, std::string>> state_labels_, action_labels_;
    int initial_ = 0;
    int num_states_ = -1;
};

class UmdpBuilder {
  public:
    UmdpBuilder& initial(int state);
    UmdpBuilder& states(int count);
    UmdpBuilder& row(int state, int action, double reward,
                     std::vector<std::tuple<int, double, double>> successors);
    UncertainMdp finalize();

  private:
    struct Row {
        int state;
        int action;
        double reward;
        std::vector<std::tuple<int, double, double>> succs;
    };
    std::vector<Row> rows_;
    int initial_ = 0;
    int num_states_ = -1;
};

} // namespace ramdp
