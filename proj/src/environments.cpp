#include "ramdp/environments.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ramdp {

namespace {

Environment finish(Environment env) {
    if (auto report = validate_mdp(env.mdp); !report.ok())
        throw std::logic_error("environment " + env.name + " invalid: " + report.summary());
    std::sort(env.spec.targets.begin(), env.spec.targets.end());
    std::sort(env.spec.avoid.begin(), env.spec.avoid.end());
    return env;
}

Environment build_chain_impl(int n, bool swapped) {
    if (n < 2)
        throw std::invalid_argument("build_chain: need at least 2 states");

    const double forward = swapped ? 0.05 : 0.95;
    MdpBuilder builder;
    builder.initial(0).states(n);
    builder.action_label(0, "fast").action_label(1, "slow").action_label(2, "coin");
    for (int s = 0; s < n - 1; ++s) {
        auto advance_reset = [&](double adv) -> std::vector<std::pair<int, double>> {
            return {{s + 1, adv}, {0, 1.0 - adv}};
        };
        builder.row(s, 0, 1.0, advance_reset(forward));
        builder.row(s, 1, 1.0, advance_reset(1.0 - forward));
        builder.row(s, 2, 1.0, advance_reset(0.5));
    }
    builder.row(n - 1, 0, 0.0, {{n - 1, 1.0}});

    Environment env;
    env.name = swapped ? "chain_swapped" : "chain";
    env.params = std::to_string(n) + " states, 3 actions per interior state";
    env.mdp = builder.finalize();
    env.spec = {SpecKind::ExpectedReward, {n - 1}, {}, Direction::Min, Semantics::Exact};
    return finish(std::move(env));
}

} // namespace

Environment build_chain(int n_states) {
    return build_chain_impl(n_states, false);
}

Environment build_chain_swapped(int n_states) {
    return build_chain_impl(n_states, true);
}

Environment build_betting_game(double win_prob) {
    if (!(win_prob > 0.0 && win_prob < 1.0))
        throw std::invalid_argument("build_betting_game: win_prob must lie in (0, 1)");

    constexpr int kRounds = 6;
    constexpr int kStartCoins = 10;
    const std::vector<int> kBets = {0, 1, 2, 5, 10};

    // States are (round, coins) pairs discovered by forward search, then the
    // round-6 coin states feed one collect action each into their own
    // absorbing terminal.
    std::map<std::pair<int, int>, int> ids;
    std::vector<std::pair<int, int>> order;
    auto id_of = [&](int round, int coins) {
        auto [it, inserted] = ids.try_emplace({round, coins}, static_cast<int>(ids.size()));
        if (inserted)
            order.push_back({round, coins});
        return it->second;
    };

    id_of(0, kStartCoins);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto [round, coins] = order[i];
        if (round == kRounds)
            continue;
        for (int bet : kBets)
            if (bet <= coins) {
                id_of(round + 1, coins + bet);
                if (bet > 0)
                    id_of(round + 1, coins - bet);
            }
    }

    const int first_terminal = static_cast<int>(order.size());
    MdpBuilder builder;
    builder.initial(0);
    builder.action_label(0, "bet0").action_label(1, "bet1").action_label(2, "bet2");
    builder.action_label(3, "bet5").action_label(4, "bet10");
    std::vector<int> terminals;
    int next_terminal = first_terminal;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto [round, coins] = order[i];
        const int s = ids.at({round, coins});
        if (round == kRounds) {
            const int term = next_terminal++;
            builder.row(s, 0, static_cast<double>(coins), {{term, 1.0}});
            builder.row(term, 0, 0.0, {{term, 1.0}});
            terminals.push_back(term);
            continue;
        }
        for (std::size_t b = 0; b < kBets.size(); ++b) {
            const int bet = kBets[b];
            if (bet > coins)
                continue;
            const int action = static_cast<int>(b);
            if (bet == 0) {
                builder.row(s, action, 0.0, {{ids.at({round + 1, coins}), 1.0}});
            } else {
                builder.row(s, action, 0.0,
                            {{ids.at({round + 1, coins + bet}), win_prob},
                             {ids.at({round + 1, coins - bet}), 1.0 - win_prob}});
            }
        }
    }

    Environment env;
    env.name = win_prob >= 0.5 ? "betting_favourable" : "betting_unfavourable";
    std::ostringstream params;
    params << "win_prob=" << win_prob << ", 10 coins, 6 rounds, bets {0,1,2,5,10}";
    env.params = params.str();
    env.mdp = builder.finalize();
    env.spec = {SpecKind::ExpectedReward, terminals, {}, Direction::Max, Semantics::Exact};
    return finish(std::move(env));
}

namespace {

struct GridLayout {
    int rows = 0, cols = 0;
    int start = -1, goal = -1;
    std::vector<int> traps;
    std::vector<char> cells; // row-major
};

GridLayout load_grid_layout(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open grid layout: " + path);
    GridLayout layout;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (layout.cols == 0)
            layout.cols = static_cast<int>(line.size());
        else if (static_cast<int>(line.size()) != layout.cols)
            throw std::runtime_error("grid layout rows differ in length: " + path);
        for (char c : line) {
            const int cell = static_cast<int>(layout.cells.size());
            switch (c) {
            case 'S': layout.start = cell; break;
            case 'G': layout.goal = cell; break;
            case 'X': layout.traps.push_back(cell); break;
            case '.': break;
            default:
                throw std::runtime_error(std::string("grid layout: unknown cell '") + c + "'");
            }
            layout.cells.push_back(c);
        }
        layout.rows++;
    }
    if (layout.start < 0 || layout.goal < 0)
        throw std::runtime_error("grid layout needs one S and one G: " + path);
    return layout;
}

} // namespace

Environment build_grid(const std::string& layout_path) {
    const GridLayout layout = load_grid_layout(layout_path);
    const int rows = layout.rows, cols = layout.cols;
    std::vector<char> trap(rows * cols, 0);
    for (int t : layout.traps)
        trap[t] = 1;

    constexpr double kIntended = 0.55;
    constexpr double kSlip = 0.15;
    // N, E, S, W
    const int drow[4] = {-1, 0, 1, 0};
    const int dcol[4] = {0, 1, 0, -1};

    MdpBuilder builder;
    builder.initial(layout.start).states(rows * cols);
    builder.action_label(0, "north").action_label(1, "east");
    builder.action_label(2, "south").action_label(3, "west");

    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const int cell = r * cols + c;
            if (trap[cell]) {
                builder.row(cell, 0, 0.0, {{cell, 1.0}});
                continue;
            }
            auto neighbour = [&](int dir) -> int { // -1 when off the grid
                const int nr = r + drow[dir], nc = c + dcol[dir];
                return nr < 0 || nr >= rows || nc < 0 || nc >= cols ? -1 : nr * cols + nc;
            };
            for (int a = 0; a < 4; ++a) {
                // Blocked intended moves stay in place; blocked slips pile
                // onto the intended destination.
                const int intended_dest = neighbour(a) >= 0 ? neighbour(a) : cell;
                std::map<int, double> mass;
                mass[intended_dest] += kIntended;
                for (int d = 0; d < 4; ++d) {
                    if (d == a)
                        continue;
                    const int slip_dest = neighbour(d) >= 0 ? neighbour(d) : intended_dest;
                    mass[slip_dest] += kSlip;
                }
                std::vector<std::pair<int, double>> successors(mass.begin(), mass.end());
                builder.row(cell, a, 0.0, std::move(successors));
            }
        }

    Environment env;
    env.name = "grid";
    env.params = std::to_string(rows) + "x" + std::to_string(cols) + " slippery grid, " +
                 std::to_string(layout.traps.size()) + " traps";
    env.mdp = builder.finalize();
    env.spec = {SpecKind::ReachAvoid, {layout.goal}, layout.traps, Direction::Max,
                Semantics::Exact};
    return finish(std::move(env));
}

Environment build_bandit() {
    MdpBuilder builder;
    builder.initial(0).states(3);
    const int success = 1, failure = 2;
    for (int arm = 1; arm <= 99; ++arm) {
        const double p = arm / 100.0;
        builder.row(0, arm - 1, 0.0, {{success, p}, {failure, 1.0 - p}});
    }
    builder.row(success, 0, 0.0, {{success, 1.0}});
    builder.row(failure, 0, 0.0, {{failure, 1.0}});

    Environment env;
    env.name = "bandit";
    env.params = "99 arms, success probabilities 0.01..0.99";
    env.mdp = builder.finalize();
    env.mdp.state_labels = {"start", "success", "failure"};
    env.spec = {SpecKind::Reach, {success}, {}, Direction::Max, Semantics::Exact};
    env.known_optimum = 0.99;
    env.optimum_note = "best arm";
    return finish(std::move(env));
}

AircraftLayout load_aircraft_layout(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open aircraft layout: " + path);
    AircraftLayout layout;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::istringstream fields(line);
        std::string key, eq;
        double value;
        if (!(fields >> key >> eq >> value) || eq != "=")
            throw std::runtime_error("aircraft layout: bad line " + std::to_string(line_no));
        if (key == "altitudes")
            layout.altitudes = static_cast<int>(value);
        else if (key == "steps")
            layout.steps = static_cast<int>(value);
        else if (key == "own_start")
            layout.own_start = static_cast<int>(value);
        else if (key == "adversary_start")
            layout.adversary_start = static_cast<int>(value);
        else if (key == "own_success")
            layout.own_success = value;
        else if (key == "adv_up")
            layout.adv_up = value;
        else if (key == "adv_down")
            layout.adv_down = value;
        else if (key == "adv_stay")
            layout.adv_stay = value;
        else
            throw std::runtime_error("aircraft layout: unknown key " + key);
    }
    return layout;
}

Environment build_aircraft(const AircraftLayout& layout) {
    const int L = layout.altitudes, steps = layout.steps;
    if (L < 1 || steps < 1)
        throw std::invalid_argument("build_aircraft: need at least 1 altitude and 1 step");
    if (layout.own_start < 0 || layout.own_start >= L || layout.adversary_start < 0 ||
        layout.adversary_start >= L)
        throw std::invalid_argument("build_aircraft: start altitudes outside the ladder");
    if (std::abs(layout.adv_up + layout.adv_down + layout.adv_stay - 1.0) > kProbTolerance)
        throw std::invalid_argument("build_aircraft: adversary distribution must sum to 1");

    auto clamp = [&](int h) { return std::min(L - 1, std::max(0, h)); };

    // Reachable (t, own, adversary) states for t < steps, then two sinks.
    std::map<std::tuple<int, int, int>, int> ids;
    std::vector<std::tuple<int, int, int>> order;
    auto id_of = [&](int t, int h1, int h2) {
        auto [it, inserted] =
            ids.try_emplace({t, h1, h2}, static_cast<int>(ids.size()));
        if (inserted)
            order.push_back({t, h1, h2});
        return it->second;
    };

    id_of(0, layout.own_start, layout.adversary_start);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto [t, h1, h2] = order[i];
        if (t + 1 == steps)
            continue;
        for (int delta = -1; delta <= 1; ++delta) {
            const int intended = clamp(h1 + delta);
            for (int adv = -1; adv <= 1; ++adv) {
                id_of(t + 1, intended, clamp(h2 + adv));
                id_of(t + 1, h1, clamp(h2 + adv));
            }
        }
    }

    const int passed = static_cast<int>(order.size());
    const int collision = passed + 1;

    MdpBuilder builder;
    builder.initial(0).states(collision + 1);
    builder.action_label(0, "descend").action_label(1, "hold").action_label(2, "climb");

    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto [t, h1, h2] = order[i];
        const int s = ids.at({t, h1, h2});
        const bool last = t + 1 == steps;
        for (int action = 0; action < 3; ++action) {
            const int delta = action - 1;
            const int intended = clamp(h1 + delta);
            std::vector<std::pair<int, double>> own;
            if (intended == h1)
                own = {{h1, 1.0}};
            else
                own = {{intended, layout.own_success}, {h1, 1.0 - layout.own_success}};

            std::map<int, double> mass;
            for (const auto& [own_alt, p1] : own) {
                auto add_adv = [&](int adv_alt, double p2) {
                    if (p2 <= 0.0)
                        return;
                    int dest;
                    if (last)
                        dest = own_alt == adv_alt ? collision : passed;
                    else
                        dest = ids.at({t + 1, own_alt, adv_alt});
                    mass[dest] += p1 * p2;
                };
                double up = layout.adv_up, down = layout.adv_down, stay = layout.adv_stay;
                if (h2 + 1 >= L) {
                    stay += up;
                    up = 0.0;
                }
                if (h2 - 1 < 0) {
                    stay += down;
                    down = 0.0;
                }
                add_adv(clamp(h2 + 1), up);
                add_adv(clamp(h2 - 1), down);
                add_adv(h2, stay);
            }
            std::vector<std::pair<int, double>> successors(mass.begin(), mass.end());
            builder.row(s, action, 0.0, std::move(successors));
        }
    }
    builder.row(passed, 0, 0.0, {{passed, 1.0}});
    builder.row(collision, 0, 0.0, {{collision, 1.0}});

    Environment env;
    env.name = "aircraft";
    std::ostringstream params;
    params << L << " altitudes, " << steps << " steps, own success " << layout.own_success;
    env.params = params.str();
    env.mdp = builder.finalize();
    env.spec = {SpecKind::ReachAvoid, {passed}, {collision}, Direction::Max, Semantics::Exact};
    return finish(std::move(env));
}

Environment build_aircraft(const std::string& layout_path) {
    return build_aircraft(load_aircraft_layout(layout_path));
}

std::string default_data_dir() {
    if (const char* env = std::getenv("RAMDP_DATA_DIR"); env && *env)
        return env;
    return RAMDP_DATA_DIR;
}

Environment make_environment(const std::string& name, const std::string& data_dir) {
    const std::string dir = data_dir.empty() ? default_data_dir() : data_dir;
    if (name == "chain")
        return build_chain(30);
    if (name == "chain_swapped")
        return build_chain_swapped(30);
    if (name == "betting_favourable")
        return build_betting_game(0.8);
    if (name == "betting_unfavourable")
        return build_betting_game(0.2);
    if (name == "grid")
        return build_grid(dir + "/grid.layout");
    if (name == "bandit")
        return build_bandit();
    if (name == "aircraft")
        return build_aircraft(dir + "/aircraft.layout");
    throw std::invalid_argument("unknown environment: " + name);
}

std::vector<Environment> headline_environments(const std::string& data_dir) {
    std::vector<Environment> envs;
    for (const char* name : {"chain", "betting_favourable", "betting_unfavourable", "grid",
                             "bandit", "aircraft"})
        envs.push_back(make_environment(name, data_dir));
    return envs;
}

} // namespace ramdp
