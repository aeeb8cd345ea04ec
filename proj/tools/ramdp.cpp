// ramdp: learn MDPs through interval MDPs and compute robust policies.
//
// Subcommands:
//   run        execute a configured experiment, writing per-record and
//              aggregated CSVs
//   solve      solve a reachability / expected-reward query on a model file
//   list-envs  print the bundled benchmark environments
//   export-env write a bundled environment in the textual model format

#include "ramdp/config.hpp"
#include "ramdp/environments.hpp"
#include "ramdp/harness.hpp"
#include "ramdp/model_io.hpp"
#include "ramdp/solver.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string spec_to_string(const ramdp::Specification& spec) {
    std::ostringstream os;
    os << (spec.kind == ramdp::SpecKind::ExpectedReward ? "R" : "P");
    os << (spec.direction == ramdp::Direction::Max ? "_Max" : "_Min");
    os << "(";
    if (spec.kind == ramdp::SpecKind::ReachAvoid)
        os << "!avoid U ";
    else
        os << "<> ";
    if (spec.targets.size() == 1)
        os << "s" << spec.targets.front();
    else
        os << spec.targets.size() << " targets";
    os << ")";
    return os.str();
}

std::vector<int> parse_state_list(const std::string& text) {
    std::vector<int> states;
    std::stringstream fields(text);
    std::string token;
    while (std::getline(fields, token, ',')) {
        if (token.empty())
            continue;
        std::size_t used = 0;
        int state = -1;
        try {
            state = std::stoi(token, &used);
        } catch (...) {
        }
        if (used != token.size() || state < 0)
            throw ramdp::ConfigError("unknown target label '" + token + "'");
        states.push_back(state);
    }
    return states;
}

int default_workers() {
    if (const char* env = std::getenv("RAMDP_WORKERS"); env && *env) {
        const int workers = std::atoi(env);
        if (workers >= 1)
            return workers;
    }
    return 1;
}

int cmd_run(const std::string& config_path, const std::string& out_prefix,
            std::int64_t seed_override, int workers_override) {
    ramdp::ExperimentConfig config = ramdp::load_experiment_config(config_path);
    if (seed_override >= 0)
        config.base_seed = static_cast<std::uint64_t>(seed_override);
    if (workers_override > 0)
        config.workers = workers_override;
    else if (config.workers <= 0)
        config.workers = default_workers();

    const ramdp::ExperimentResult result = ramdp::run_experiment(config);
    for (const auto& failure : result.failures)
        std::cerr << "warning: repetition failed and was excluded: " << failure << "\n";
    if (result.records.empty()) {
        std::cerr << "error: every repetition failed\n";
        return kExitRuntime;
    }

    const std::string records_path = out_prefix + "_records.csv";
    {
        std::ofstream out(records_path);
        if (!out)
            throw std::runtime_error("cannot write " + records_path);
        ramdp::write_records_csv(out, result.records);
    }
    std::cout << "wrote " << records_path << " (" << result.records.size() << " records)\n";

    if (config.repetitions >= 2) {
        const std::string aggregate_path = out_prefix + "_aggregate.csv";
        std::ofstream out(aggregate_path);
        if (!out)
            throw std::runtime_error("cannot write " + aggregate_path);
        const auto rows = ramdp::aggregate(result.records);
        ramdp::write_aggregate_csv(out, rows);
        std::cout << "wrote " << aggregate_path << " (" << rows.size() << " rows)\n";
    } else {
        std::cout << "single repetition: aggregation skipped\n";
    }
    return result.failures.empty() ? kExitOk : kExitRuntime;
}

int cmd_solve(const std::string& model_path, const std::string& spec_name,
              const std::string& targets_text, const std::string& avoid_text,
              const std::string& semantics_name, double tolerance,
              const std::string& policy_path) {
    ramdp::Specification spec;
    if (spec_name == "pmax")
        spec = {ramdp::SpecKind::Reach, {}, {}, ramdp::Direction::Max};
    else if (spec_name == "pmin")
        spec = {ramdp::SpecKind::Reach, {}, {}, ramdp::Direction::Min};
    else if (spec_name == "rmax")
        spec = {ramdp::SpecKind::ExpectedReward, {}, {}, ramdp::Direction::Max};
    else if (spec_name == "rmin")
        spec = {ramdp::SpecKind::ExpectedReward, {}, {}, ramdp::Direction::Min};
    else
        throw ramdp::ConfigError("--spec must be pmax, pmin, rmax or rmin");

    spec.targets = parse_state_list(targets_text);
    if (spec.targets.empty())
        throw ramdp::ConfigError("--targets must name at least one state");
    std::sort(spec.targets.begin(), spec.targets.end());
    if (!avoid_text.empty()) {
        if (spec.kind == ramdp::SpecKind::ExpectedReward)
            throw ramdp::ConfigError("--avoid applies to probability specifications only");
        spec.kind = ramdp::SpecKind::ReachAvoid;
        spec.avoid = parse_state_list(avoid_text);
        std::sort(spec.avoid.begin(), spec.avoid.end());
    }

    const ramdp::ParsedModel model = ramdp::load_model(model_path);
    const bool interval_model = std::holds_alternative<ramdp::UncertainMdp>(model);

    std::string semantics = semantics_name;
    if (semantics.empty())
        semantics = interval_model ? "pessimistic" : "exact";
    if (semantics == "exact")
        spec.semantics = ramdp::Semantics::Exact;
    else if (semantics == "optimistic")
        spec.semantics = ramdp::Semantics::Optimistic;
    else if (semantics == "pessimistic")
        spec.semantics = ramdp::Semantics::Pessimistic;
    else
        throw ramdp::ConfigError("--semantics must be exact, optimistic or pessimistic");

    const int num_states = interval_model ? std::get<ramdp::UncertainMdp>(model).num_states
                                          : std::get<ramdp::Mdp>(model).num_states;
    for (int s : spec.targets)
        if (s >= num_states)
            throw ramdp::ConfigError("unknown target label '" + std::to_string(s) + "'");
    for (int s : spec.avoid)
        if (s >= num_states)
            throw ramdp::ConfigError("unknown avoid label '" + std::to_string(s) + "'");

    ramdp::SolveOptions options;
    options.tolerance = tolerance;
    ramdp::SolveResult result;
    int initial = 0;
    if (interval_model) {
        if (spec.semantics == ramdp::Semantics::Exact)
            throw ramdp::ConfigError(
                "interval models need optimistic or pessimistic semantics");
        const auto& umdp = std::get<ramdp::UncertainMdp>(model);
        result = ramdp::robust_value_iteration(umdp, spec, options);
        initial = umdp.initial_state;
    } else {
        if (spec.semantics != ramdp::Semantics::Exact)
            throw ramdp::ConfigError("exact models need exact semantics");
        const auto& mdp = std::get<ramdp::Mdp>(model);
        result = ramdp::exact_value_iteration(mdp, spec, options);
        initial = mdp.initial_state;
    }

    std::printf("%.10g\n", result.values[initial]);
    if (!policy_path.empty()) {
        std::ofstream out(policy_path);
        if (!out)
            throw std::runtime_error("cannot write " + policy_path);
        for (std::size_t s = 0; s < result.policy.choice.size(); ++s)
            out << s << ' ' << result.policy.choice[s] << '\n';
        std::cout << "wrote " << policy_path << "\n";
    }
    return kExitOk;
}

int cmd_list_envs() {
    for (const auto& env : ramdp::headline_environments()) {
        std::cout << env.name << " " << env.mdp.num_states << " states "
                  << env.mdp.transition_count() << " transitions  "
                  << spec_to_string(env.spec) << "  " << env.params;
        if (env.known_optimum)
            std::cout << "  optimum=" << *env.known_optimum << " (" << env.optimum_note << ")";
        std::cout << "\n";
    }
    return kExitOk;
}

int cmd_export_env(const std::string& name, const std::string& out_path) {
    const ramdp::Environment env = ramdp::make_environment(name);
    std::ostringstream body;
    body << "# " << env.name << ": " << env.params << "\n";
    body << "# specification: " << spec_to_string(env.spec) << "\n";
    body << "# targets:";
    for (int t : env.spec.targets)
        body << ' ' << t;
    body << "\n";
    if (!env.spec.avoid.empty()) {
        body << "# avoid:";
        for (int a : env.spec.avoid)
            body << ' ' << a;
        body << "\n";
    }
    ramdp::write_model(body, env.mdp);
    if (out_path.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream out(out_path);
        if (!out)
            throw std::runtime_error("cannot write " + out_path);
        out << body.str();
        std::cout << "wrote " << out_path << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"learning MDPs through interval MDPs with robust policies"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a configured experiment");
    std::string config_path, out_prefix = "results";
    std::int64_t seed_override = -1;
    int workers_override = 0;
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_option("--out", out_prefix, "output CSV path prefix");
    run->add_option("--seed", seed_override, "override the base seed");
    run->add_option("--workers", workers_override,
                    "parallel repetitions (default: RAMDP_WORKERS or 1)");

    auto* solve = app.add_subcommand("solve", "solve a specification on a model file");
    std::string model_path, spec_name, targets_text, avoid_text, semantics_name, policy_path;
    double tolerance = 1e-6;
    solve->add_option("model", model_path, "model file")->required();
    solve->add_option("--spec", spec_name, "pmax | pmin | rmax | rmin")->required();
    solve->add_option("--targets", targets_text, "comma-separated target states")->required();
    solve->add_option("--avoid", avoid_text, "comma-separated avoid states (reach-avoid)");
    solve->add_option("--semantics", semantics_name,
                      "exact | optimistic | pessimistic (default by model kind)");
    solve->add_option("--tolerance", tolerance, "value iteration tolerance");
    solve->add_option("--policy", policy_path, "write the greedy policy here");

    auto* list = app.add_subcommand("list-envs", "print the bundled environments");

    auto* export_env = app.add_subcommand("export-env", "write an environment as a model file");
    std::string env_name, export_path;
    export_env->add_option("name", env_name, "environment name")->required();
    export_env->add_option("--out", export_path, "output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (run->parsed())
            return cmd_run(config_path, out_prefix, seed_override, workers_override);
        if (solve->parsed())
            return cmd_solve(model_path, spec_name, targets_text, avoid_text, semantics_name,
                             tolerance, policy_path);
        if (list->parsed())
            return cmd_list_envs();
        if (export_env->parsed())
            return cmd_export_env(env_name, export_path);
    } catch (const ramdp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
