#pragma once

#include "ensheat/scenario.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace ensheat {

/// A scenario read from a YAML file plus where its outputs go.
///
///     mesh:         {structured: 64}  or  {file: square.mesh}
///     boundary:     list of {label, kind: dirichlet|neumann|robin, value, alpha}
///     conductivity: {kind, <law parameters>, kappa_min, kappa_max, c_kappa}
///     source:       expression (optional)
///     ensemble:     {initial: [expr, ...]}
///                   or {initial: expr, members: J, exponent: l, bases: [...]}
///                   (member j starts from (1 + base_j 10^-l) initial; without
///                   exponent/bases all members start from the same field)
///     time:         {dt, t_star}
///     output:       {dir, norms, prefix, snapshot_every}
///
/// `value` and `source` take one expression or one per member. Expressions
/// use x, y, t (see Expression).
struct ScenarioConfig {
    Scenario scenario;
    std::optional<std::filesystem::path> output_dir;
    std::string norms_file = "norms.csv";
    std::string snapshot_prefix = "field";
};

/// Throws FormatError (with the offending line) for malformed YAML or
/// expressions and ValidationError for missing files or broken invariants.
ScenarioConfig load_config(const std::filesystem::path& path);
/// `base_dir` resolves relative mesh paths.
ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

} // namespace ensheat
