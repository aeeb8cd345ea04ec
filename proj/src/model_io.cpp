#include "ramdp/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ramdp {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& message) {
    throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + message);
}

struct RawTransition {
    int succ;
    double a, b; // prob or [lo, hi]
};

std::string real(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

} // namespace

ParsedModel parse_model(std::istream& in, const std::string& origin) {
    std::map<std::pair<int, int>, std::vector<RawTransition>> transitions;
    std::map<std::pair<int, int>, double> rewards;
    int initial = 0;
    int arity = 0; // 5 = exact, 6 = interval
    int line_no = 0;
    std::string line;

    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        std::istringstream fields(line);
        std::string tag;
        if (!(fields >> tag))
            continue;
        if (tag == "I") {
            if (!(fields >> initial) || initial < 0)
                fail(origin, line_no, "expected 'I <state>'");
        } else if (tag == "R") {
            int s, a;
            double r;
            if (!(fields >> s >> a >> r) || s < 0 || a < 0)
                fail(origin, line_no, "expected 'R <state> <action> <reward>'");
            rewards[{s, a}] = r;
        } else if (tag == "T") {
            int s, a, succ;
            double x, y;
            if (!(fields >> s >> a >> succ >> x) || s < 0 || a < 0 || succ < 0)
                fail(origin, line_no, "expected 'T <state> <action> <succ> <prob> [<hi>]'");
            int this_arity = 5;
            if (fields >> y)
                this_arity = 6;
            if (arity == 0)
                arity = this_arity;
            else if (arity != this_arity)
                fail(origin, line_no, "mixed exact and interval transition lines");
            transitions[{s, a}].push_back({succ, x, this_arity == 6 ? y : 0.0});
        } else {
            fail(origin, line_no, "unknown record '" + tag + "'");
        }
        std::string rest;
        if (fields >> rest)
            fail(origin, line_no, "trailing content '" + rest + "'");
    }
    if (transitions.empty())
        fail(origin, line_no, "no transitions");

    if (arity == 5) {
        MdpBuilder builder;
        builder.initial(initial);
        for (auto& [pair, raw] : transitions) {
            double sum = 0.0;
            std::vector<std::pair<int, double>> successors;
            for (const auto& transition : raw) {
                sum += transition.a;
                successors.emplace_back(transition.succ, transition.a);
            }
            if (std::abs(sum - 1.0) > kProbTolerance) {
                std::ostringstream os;
                os << "probabilities of (s" << pair.first << ",a" << pair.second << ") sum to "
                   << sum;
                fail(origin, line_no, os.str());
            }
            for (auto& [succ, prob] : successors)
                prob /= sum; // normalize within tolerance
            double reward = 0.0;
            if (auto it = rewards.find(pair); it != rewards.end())
                reward = it->second;
            builder.row(pair.first, pair.second, reward, std::move(successors));
        }
        Mdp mdp = builder.finalize();
        if (auto report = validate_mdp(mdp); !report.ok())
            throw std::runtime_error(origin + ": invalid model: " + report.summary());
        return mdp;
    }

    UmdpBuilder builder;
    builder.initial(initial);
    for (auto& [pair, raw] : transitions) {
        std::vector<std::tuple<int, double, double>> successors;
        for (const auto& transition : raw)
            successors.emplace_back(transition.succ, transition.a, transition.b);
        double reward = 0.0;
        if (auto it = rewards.find(pair); it != rewards.end())
            reward = it->second;
        builder.row(pair.first, pair.second, reward, std::move(successors));
    }
    UncertainMdp umdp = builder.finalize();
    if (auto report = validate_umdp(umdp); !report.ok())
        throw std::runtime_error(origin + ": invalid model: " + report.summary());
    return umdp;
}

ParsedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open model file: " + path);
    return parse_model(in, path);
}

void write_model(std::ostream& out, const Mdp& mdp) {
    out << "I " << mdp.initial_state << '\n';
    for (int p = 0; p < mdp.pair_count(); ++p) {
        if (mdp.pair_reward[p] != 0.0)
            out << "R " << mdp.pair_state[p] << ' ' << mdp.pair_action[p] << ' '
                << real(mdp.pair_reward[p]) << '\n';
        for (int t = mdp.succ_begin[p]; t < mdp.succ_begin[p + 1]; ++t)
            out << "T " << mdp.pair_state[p] << ' ' << mdp.pair_action[p] << ' '
                << mdp.succ_state[t] << ' ' << real(mdp.succ_prob[t]) << '\n';
    }
}

void write_model(std::ostream& out, const UncertainMdp& umdp) {
    out << "I " << umdp.initial_state << '\n';
    for (int p = 0; p < umdp.pair_count(); ++p) {
        if (umdp.pair_reward[p] != 0.0)
            out << "R " << umdp.pair_state[p] << ' ' << umdp.pair_action[p] << ' '
                << real(umdp.pair_reward[p]) << '\n';
        for (int t = umdp.succ_begin[p]; t < umdp.succ_begin[p + 1]; ++t)
            out << "T " << umdp.pair_state[p] << ' ' << umdp.pair_action[p] << ' '
                << umdp.succ_state[t] << ' ' << real(umdp.succ_lo[t]) << ' '
                << real(umdp.succ_hi[t]) << '\n';
    }
}

} // namespace ramdp
