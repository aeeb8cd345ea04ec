#pragma once

#include "ramdp/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ramdp {

/// One benchmark: the true MDP, its specification, and display metadata.
struct Environment {
    std::string name;
    std::string params;
    Mdp mdp;
    Specification spec;
    std::optional<double> known_optimum;
    std::string optimum_note;
};

/// n-state chain: three actions per non-final state (advance 0.95/reset 0.05,
/// the reverse, and 0.5/0.5), every action reward 1, minimize the expected
/// reward to reach the last state.
Environment build_chain(int n_states);

/// Chain with the 0.95/0.05 action probabilities swapped (same support); used
/// as the post-switch environment in changing-environment runs.
Environment build_chain_swapped(int n_states);

/// Betting game: start with 10 coins, 6 rounds, bets {0,1,2,5,10} capped by
/// the current coins, win doubles the stake with `win_prob`. The round-6 coin
/// states carry the final coins as reward into per-coin terminal states.
Environment build_betting_game(double win_prob);

/// Slippery grid from a layout file (rows of S/G/X/. characters): intended
/// move succeeds with 0.55, the three other directions get 0.15 each; a
/// blocked intended move stays in place and a blocked slip joins the intended
/// destination; traps are absorbing. Reach the goal without getting trapped.
Environment build_grid(const std::string& layout_path);

/// 99-armed bandit: arm i succeeds with probability i/100 into an absorbing
/// success state.
Environment build_bandit();

struct AircraftLayout {
    int altitudes = 5;
    int steps = 5;
    int own_start = 1;
    int adversary_start = 3;
    double own_success = 0.8;
    double adv_up = 0.3;
    double adv_down = 0.3;
    double adv_stay = 0.4;
};

AircraftLayout load_aircraft_layout(const std::string& path);

/// Two aircraft on a discrete altitude ladder: the controlled altitude change
/// succeeds with 0.8 (else stays), the adversary moves up/down/stays with
/// 0.3/0.3/0.4. After the approach steps the outcome routes into a passed or
/// collision sink; maximize the probability of passing without collision.
Environment build_aircraft(const AircraftLayout& layout);
Environment build_aircraft(const std::string& layout_path);

/// Directory holding the bundled layout files: the RAMDP_DATA_DIR environment
/// variable when set, the configured source data directory otherwise.
std::string default_data_dir();

/// Builder lookup by name. Valid names: chain, chain_swapped,
/// betting_favourable, betting_unfavourable, grid, bandit, aircraft.
Environment make_environment(const std::string& name, const std::string& data_dir = "");

/// The six benchmark rows shown by list-envs (the betting game appears twice).
std::vector<Environment> headline_environments(const std::string& data_dir = "");

} // namespace ramdp
