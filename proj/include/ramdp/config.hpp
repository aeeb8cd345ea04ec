#pragma once

#include "ramdp/harness.hpp"

#include <iosfwd>
#include <string>

namespace ramdp {

/// Raised for malformed experiment configuration files; message carries
/// file:line context.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key = value format with sections:
///
///   [experiment]
///   environment = betting_favourable   # required
///   trajectories = 1000                # K
///   horizon = 0                        # 0: 10 * |S|
///   repetitions = 100
///   seed = 1
///   xi = 1.0
///   tolerance = 1e-6
///   workers = 1
///   timing = true
///   doubling = pair                    # or: transition
///   exploration = optimistic           # or: uniform
///
///   [switching]                        # optional
///   environment = chain_swapped
///   after = 1000
///
///   [learner <name>]                   # one per learner, name used in CSVs
///   method = lui                       # lui | pac | map | ucrl2
///   epsilon = 1e-4
///   strength = 5 10
///   cap = 50 100                       # LUI only, optional
///   alpha = 10
///   gamma = 0.01
///
/// Unknown sections or keys are rejected.
ExperimentConfig parse_experiment_config(std::istream& in,
                                         const std::string& origin = "<stream>");
ExperimentConfig load_experiment_config(const std::string& path);

/// Inverse of parsing: emits a document that parses back to the same config.
std::string serialize_experiment_config(const ExperimentConfig& config);

} // namespace ramdp
