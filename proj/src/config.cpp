#include "ramdp/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ramdp {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& message) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + message);
}

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        return "";
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

struct Cursor {
    std::string origin;
    int line = 0;

    double real(const std::string& key, const std::string& value) const {
        try {
            std::size_t used = 0;
            const double parsed = std::stod(value, &used);
            if (used != value.size())
                throw std::invalid_argument("");
            return parsed;
        } catch (...) {
            fail(origin, line, "key '" + key + "': expected a number, got '" + value + "'");
        }
    }

    std::int64_t integer(const std::string& key, const std::string& value) const {
        try {
            std::size_t used = 0;
            const std::int64_t parsed = std::stoll(value, &used);
            if (used != value.size())
                throw std::invalid_argument("");
            return parsed;
        } catch (...) {
            fail(origin, line, "key '" + key + "': expected an integer, got '" + value + "'");
        }
    }

    bool boolean(const std::string& key, const std::string& value) const {
        if (value == "true" || value == "1" || value == "on")
            return true;
        if (value == "false" || value == "0" || value == "off")
            return false;
        fail(origin, line, "key '" + key + "': expected true/false, got '" + value + "'");
    }

    StrengthInterval strength_pair(const std::string& key, const std::string& value) const {
        std::istringstream fields(value);
        std::int64_t lo, hi;
        std::string rest;
        if (!(fields >> lo >> hi) || (fields >> rest))
            fail(origin, line, "key '" + key + "': expected two integers, got '" + value + "'");
        return {lo, hi};
    }
};

LearnMethod parse_method(const Cursor& cursor, const std::string& value) {
    if (value == "lui")
        return LearnMethod::Lui;
    if (value == "pac")
        return LearnMethod::Pac;
    if (value == "map")
        return LearnMethod::Map;
    if (value == "ucrl2")
        return LearnMethod::Ucrl2;
    fail(cursor.origin, cursor.line, "unknown learner method '" + value + "'");
}

} // namespace

ExperimentConfig parse_experiment_config(std::istream& in, const std::string& origin) {
    ExperimentConfig config;
    config.trajectory_budget = 1000;

    enum class Section { None, Experiment, Switching, Learner };
    Section section = Section::None;
    LearnerConfig* learner = nullptr;
    SwitchingSetup switching;
    bool has_switching = false;
    bool has_environment = false;
    bool method_seen = false;

    Cursor cursor{origin, 0};
    std::string line;
    while (std::getline(in, line)) {
        cursor.line++;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                fail(origin, cursor.line, "unterminated section header");
            const std::string header = trim(line.substr(1, line.size() - 2));
            if (section == Section::Learner && !method_seen)
                fail(origin, cursor.line, "learner section without a method key");
            if (header == "experiment") {
                section = Section::Experiment;
            } else if (header == "switching") {
                section = Section::Switching;
                has_switching = true;
            } else if (header.rfind("learner", 0) == 0) {
                section = Section::Learner;
                method_seen = false;
                LearnerConfig fresh;
                fresh.name = trim(header.substr(7));
                config.learners.push_back(fresh);
                learner = &config.learners.back();
            } else {
                fail(origin, cursor.line, "unknown section [" + header + "]");
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(origin, cursor.line, "expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            fail(origin, cursor.line, "expected 'key = value', got '" + line + "'");

        switch (section) {
        case Section::None:
            fail(origin, cursor.line, "key '" + key + "' outside any section");
        case Section::Experiment:
            if (key == "environment") {
                config.environment = value;
                has_environment = true;
            } else if (key == "trajectories") {
                config.trajectory_budget = cursor.integer(key, value);
            } else if (key == "horizon") {
                config.horizon = static_cast<int>(cursor.integer(key, value));
            } else if (key == "repetitions") {
                config.repetitions = static_cast<int>(cursor.integer(key, value));
            } else if (key == "seed") {
                config.base_seed = static_cast<std::uint64_t>(cursor.integer(key, value));
            } else if (key == "xi") {
                config.xi = cursor.real(key, value);
            } else if (key == "tolerance") {
                config.tolerance = cursor.real(key, value);
            } else if (key == "workers") {
                config.workers = static_cast<int>(cursor.integer(key, value));
            } else if (key == "timing") {
                config.timing = cursor.boolean(key, value);
            } else if (key == "doubling") {
                if (value == "pair")
                    config.doubling_on_transitions = false;
                else if (value == "transition")
                    config.doubling_on_transitions = true;
                else
                    fail(origin, cursor.line, "doubling must be 'pair' or 'transition'");
            } else if (key == "exploration") {
                if (value == "optimistic")
                    config.uniform_exploration = false;
                else if (value == "uniform")
                    config.uniform_exploration = true;
                else
                    fail(origin, cursor.line, "exploration must be 'optimistic' or 'uniform'");
            } else {
                fail(origin, cursor.line, "unknown key '" + key + "' in [experiment]");
            }
            break;
        case Section::Switching:
            if (key == "environment")
                switching.environment_b = value;
            else if (key == "after")
                switching.switch_after = cursor.integer(key, value);
            else
                fail(origin, cursor.line, "unknown key '" + key + "' in [switching]");
            break;
        case Section::Learner:
            if (key == "method") {
                learner->method = parse_method(cursor, value);
                if (learner->name.empty())
                    learner->name = value;
                method_seen = true;
            } else if (key == "epsilon") {
                learner->epsilon = cursor.real(key, value);
            } else if (key == "strength") {
                learner->prior_strength = cursor.strength_pair(key, value);
            } else if (key == "cap") {
                learner->strength_cap = cursor.strength_pair(key, value);
            } else if (key == "alpha") {
                learner->map_prior_alpha = cursor.real(key, value);
            } else if (key == "gamma") {
                learner->gamma = cursor.real(key, value);
            } else {
                fail(origin, cursor.line, "unknown key '" + key + "' in learner section");
            }
            break;
        }
    }

    if (section == Section::Learner && !method_seen)
        fail(origin, cursor.line, "learner section without a method key");
    if (!has_environment)
        fail(origin, cursor.line, "missing required key 'environment' in [experiment]");
    if (config.learners.empty())
        fail(origin, cursor.line, "no learner sections");
    if (has_switching) {
        if (switching.environment_b.empty())
            fail(origin, cursor.line, "missing required key 'environment' in [switching]");
        config.switching = switching;
    }
    if (config.trajectory_budget < 1)
        fail(origin, cursor.line, "trajectories must be >= 1");
    if (config.repetitions < 1)
        fail(origin, cursor.line, "repetitions must be >= 1");
    if (config.xi < 0.0 || config.xi > 1.0)
        fail(origin, cursor.line, "xi must lie in [0, 1]");
    if (config.tolerance <= 0.0)
        fail(origin, cursor.line, "tolerance must be positive");

    try {
        for (auto& l : config.learners)
            l.validate();
    } catch (const std::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }

    // Duplicate learner names would collide in the CSVs.
    for (std::size_t i = 0; i < config.learners.size(); ++i)
        for (std::size_t j = i + 1; j < config.learners.size(); ++j)
            if (config.learners[i].name == config.learners[j].name)
                throw ConfigError(origin + ": duplicate learner name '" +
                                  config.learners[i].name + "'");
    return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    return parse_experiment_config(in, path);
}

std::string serialize_experiment_config(const ExperimentConfig& config) {
    std::ostringstream out;
    auto real = [](double v) {
        char buffer[40];
        std::snprintf(buffer, sizeof buffer, "%.17g", v);
        return std::string(buffer);
    };
    out << "[experiment]\n";
    out << "environment = " << config.environment << '\n';
    out << "trajectories = " << config.trajectory_budget << '\n';
    out << "horizon = " << config.horizon << '\n';
    out << "repetitions = " << config.repetitions << '\n';
    out << "seed = " << config.base_seed << '\n';
    out << "xi = " << real(config.xi) << '\n';
    out << "tolerance = " << real(config.tolerance) << '\n';
    out << "workers = " << config.workers << '\n';
    out << "timing = " << (config.timing ? "true" : "false") << '\n';
    out << "doubling = " << (config.doubling_on_transitions ? "transition" : "pair") << '\n';
    out << "exploration = " << (config.uniform_exploration ? "uniform" : "optimistic") << '\n';
    if (config.switching) {
        out << "\n[switching]\n";
        out << "environment = " << config.switching->environment_b << '\n';
        out << "after = " << config.switching->switch_after << '\n';
    }
    for (const auto& learner : config.learners) {
        out << "\n[learner " << learner.name << "]\n";
        out << "method = " << method_name(learner.method) << '\n';
        out << "epsilon = " << real(learner.epsilon) << '\n';
        out << "strength = " << learner.prior_strength.lo << ' ' << learner.prior_strength.hi
            << '\n';
        if (learner.strength_cap)
            out << "cap = " << learner.strength_cap->lo << ' ' << learner.strength_cap->hi
                << '\n';
        out << "alpha = " << real(learner.map_prior_alpha) << '\n';
        out << "gamma = " << real(learner.gamma) << '\n';
    }
    return out.str();
}

} // namespace ramdp
