#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dtapb/sampler.hpp"

namespace dtapb {

/// Builds the Cartesian product described by a grid JSON document:
///
///   {
///     "mu":    [[0, 0], [2, -2]],
///     "sigma": [[0, 0, 0], [1, 0.5, 1]],      // [s_a^2, s_ab, s_b^2] or a 2x2 matrix
///     "k":     [10, 30],
///     "pi":    [0.5, 0.2],
///     "bias":  [{"mechanism": "none"},
///               {"mechanism": "selection", "fraction": 0.4},
///               {"mechanism": "mixture", "eta": [1.25, -1.25]}],
///     "n_min": 50, "n_max": 1000                // optional
///   }
///
/// Iteration order (outermost first) is mu, sigma, k, pi, bias, matching
/// default_grid(). Malformed documents raise ErrorCode::ParseError.
std::vector<SimCondition> parse_grid_json(std::string_view text);

std::vector<SimCondition> load_grid_file(const std::string& path);

/// "default" yields default_grid(); anything else is read as a file path.
std::vector<SimCondition> resolve_grid(const std::string& source);

}  // namespace dtapb
