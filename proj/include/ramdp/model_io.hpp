#pragma once

#include "ramdp/model.hpp"

#include <iosfwd>
#include <string>
#include <variant>

namespace ramdp {

/// Textual model format, one record per line, whitespace separated:
///   I <state>                              initial state (default 0)
///   T <state> <action> <succ> <prob>       exact transition
///   T <state> <action> <succ> <lo> <hi>    interval transition
///   R <state> <action> <reward>            action reward (default 0)
///   # comment
/// A file is an Mdp or an UncertainMdp depending on the T-line arity; mixing
/// arities is an error. Probability sums within 1e-9 of 1 are normalized,
/// anything further off is rejected.
using ParsedModel = std::variant<Mdp, UncertainMdp>;

ParsedModel parse_model(std::istream& in, const std::string& origin = "<stream>");
ParsedModel load_model(const std::string& path);

void write_model(std::ostream& out, const Mdp& mdp);
void write_model(std::ostream& out, const UncertainMdp& umdp);

} // namespace ramdp
