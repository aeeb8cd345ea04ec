#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// here deliberately avoid the library's solution paths: the simplex search
// enumerates a grid, the chain values come from dense linear algebra.

#include "ramdp/model.hpp"
#include "ramdp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace testsupport {

// Four-state example MDP: two actions at the initial state
//   a0: s0 -> {s1: 0.7, s2: 0.3}
//   a1: s0 -> {s2: 0.1, s3: 0.9}
// with absorbing s1, s2, s3.
inline ramdp::Mdp example_mdp() {
    ramdp::MdpBuilder builder;
    builder.initial(0).states(4);
    builder.row(0, 0, 0.0, {{1, 0.7}, {2, 0.3}});
    builder.row(0, 1, 0.0, {{2, 0.1}, {3, 0.9}});
    builder.row(1, 0, 0.0, {{1, 1.0}});
    builder.row(2, 0, 0.0, {{2, 1.0}});
    builder.row(3, 0, 0.0, {{3, 1.0}});
    return builder.finalize();
}

// The intermediate uncertain MDP over the same graph:
//   a0: s0 -> {s1: [0.6, 0.8], s2: [0.25, 0.33]}
//   a1: s0 -> {s2: [0.2, 0.4], s3: [0.8, 1.0]}
inline ramdp::UncertainMdp example_umdp() {
    ramdp::UmdpBuilder builder;
    builder.initial(0).states(4);
    builder.row(0, 0, 0.0, {{1, 0.6, 0.8}, {2, 0.25, 0.33}});
    builder.row(0, 1, 0.0, {{2, 0.2, 0.4}, {3, 0.8, 1.0}});
    builder.row(1, 0, 0.0, {{1, 1.0, 1.0}});
    builder.row(2, 0, 0.0, {{2, 1.0, 1.0}});
    builder.row(3, 0, 0.0, {{3, 1.0, 1.0}});
    return builder.finalize();
}

inline ramdp::Specification reach_s1_max() {
    return {ramdp::SpecKind::Reach, {1}, {}, ramdp::Direction::Max, ramdp::Semantics::Exact};
}

// ---------------------------------------------------------------------------
// Brute-force oracle for the inner optimization: walks a grid of the given
// step over the interval box, keeping points whose mass reaches 1 (the last
// component absorbs the remainder and is checked against its bounds).
// ---------------------------------------------------------------------------

struct GridOptimum {
    double objective;
    bool feasible;
};

inline GridOptimum grid_search_extreme(const std::vector<double>& lo,
                                       const std::vector<double>& hi,
                                       const std::vector<double>& values, bool maximize,
                                       double step) {
    const int m = static_cast<int>(lo.size());
    GridOptimum best{maximize ? -1e300 : 1e300, false};
    std::vector<double> point(m, 0.0);

    auto consider = [&](double total_first) {
        const double last = 1.0 - total_first;
        if (last < lo[m - 1] - 1e-12 || last > hi[m - 1] + 1e-12)
            return;
        double objective = last * values[m - 1];
        for (int i = 0; i + 1 < m; ++i)
            objective += point[i] * values[i];
        if (!best.feasible || (maximize ? objective > best.objective
                                        : objective < best.objective)) {
            best.objective = objective;
            best.feasible = true;
        }
    };

    // Grid over the first m-1 coordinates; both interval endpoints are grid
    // points regardless of the step.
    std::vector<std::vector<double>> grid(m - 1);
    for (int i = 0; i + 1 < m; ++i) {
        for (double v = lo[i]; v < hi[i] - 1e-12; v += step)
            grid[i].push_back(v);
        grid[i].push_back(hi[i]);
    }

    std::vector<std::size_t> index(m - 1, 0);
    while (true) {
        double total = 0.0;
        for (int i = 0; i + 1 < m; ++i) {
            point[i] = grid[i][index[i]];
            total += point[i];
        }
        if (total <= 1.0 + 1e-12)
            consider(total);

        int carry = m - 2;
        while (carry >= 0 && ++index[carry] >= grid[carry].size())
            index[carry--] = 0;
        if (carry < 0)
            break;
    }
    return best;
}

// All vertices of the box-simplex polytope: every coordinate at a bound except
// one free coordinate absorbing the remainder.
inline GridOptimum vertex_extreme(const std::vector<double>& lo, const std::vector<double>& hi,
                                  const std::vector<double>& values, bool maximize) {
    const int m = static_cast<int>(lo.size());
    GridOptimum best{maximize ? -1e300 : 1e300, false};
    for (int free = 0; free < m; ++free) {
        for (int mask = 0; mask < (1 << m); ++mask) {
            double total = 0.0, objective = 0.0;
            for (int i = 0; i < m; ++i) {
                if (i == free)
                    continue;
                const double p = (mask >> i) & 1 ? hi[i] : lo[i];
                total += p;
                objective += p * values[i];
            }
            const double rest = 1.0 - total;
            if (rest < lo[free] - 1e-12 || rest > hi[free] + 1e-12)
                continue;
            objective += rest * values[free];
            if (!best.feasible || (maximize ? objective > best.objective
                                            : objective < best.objective)) {
                best.objective = objective;
                best.feasible = true;
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Dense linear-system oracle for induced chains (one enabled action per
// state). Gaussian elimination with partial pivoting.
// ---------------------------------------------------------------------------

inline std::vector<double> solve_dense(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int row = col + 1; row < n; ++row)
            if (std::abs(a[row][col]) > std::abs(a[pivot][col]))
                pivot = row;
        if (std::abs(a[pivot][col]) < 1e-12)
            throw std::runtime_error("solve_dense: singular system");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int row = col + 1; row < n; ++row) {
            const double factor = a[row][col] / a[col][col];
            if (factor == 0.0)
                continue;
            for (int k = col; k < n; ++k)
                a[row][k] -= factor * a[col][k];
            b[row] -= factor * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int row = n - 1; row >= 0; --row) {
        double sum = b[row];
        for (int k = row + 1; k < n; ++k)
            sum -= a[row][k] * x[k];
        x[row] = sum / a[row][row];
    }
    return x;
}

// Expected accumulated reward until reaching `targets` in a Markov chain
// (every state must reach the targets almost surely).
inline std::vector<double> chain_expected_reward(const ramdp::Mdp& chain,
                                                 const std::vector<int>& targets) {
    const int n = chain.num_states;
    std::vector<char> is_target(n, 0);
    for (int t : targets)
        is_target[t] = 1;

    std::vector<int> index(n, -1);
    std::vector<int> free_states;
    for (int s = 0; s < n; ++s)
        if (!is_target[s]) {
            index[s] = static_cast<int>(free_states.size());
            free_states.push_back(s);
        }

    const int m = static_cast<int>(free_states.size());
    std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
    std::vector<double> b(m, 0.0);
    for (int i = 0; i < m; ++i) {
        const int s = free_states[i];
        const int pair = chain.pair_begin[s];
        a[i][i] = 1.0;
        b[i] = chain.pair_reward[pair];
        for (int t = chain.succ_begin[pair]; t < chain.succ_begin[pair + 1]; ++t) {
            const int succ = chain.succ_state[t];
            if (!is_target[succ])
                a[i][index[succ]] -= chain.succ_prob[t];
        }
    }
    const std::vector<double> x = solve_dense(std::move(a), std::move(b));
    std::vector<double> full(n, 0.0);
    for (int i = 0; i < m; ++i)
        full[free_states[i]] = x[i];
    return full;
}

} // namespace testsupport
