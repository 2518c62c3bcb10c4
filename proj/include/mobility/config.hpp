#pragma once

#include "mobility/game.hpp"

#include <string>
#include <vector>

namespace mobility {

/// Boundary files are key-value text (`key = value`, `#` comments) with keys
/// rest_y, overhead_y, lateral_left_x, lateral_right_x, forward_z, all in
/// meters. Missing keys keep the reference seated-adult boundary; unknown
/// keys are errors. The result is validated before it is returned.
MovementBoundary parse_boundary_text(const std::string& text);
MovementBoundary load_boundary(const std::string& path);
std::string boundary_text(const MovementBoundary& boundary);

/// Level config files override the stock four-level progression. INI-style
/// sections name the level (`[L2]`), and each section may set `bpm`,
/// `movement_type` (wrist|lateral|bilateral|overhead), `hold_min_s`,
/// `hold_max_s`, `duration_s`. Unknown sections or keys are errors; every
/// resulting spec is validated. An empty file yields the stock progression.
std::vector<LevelSpec> parse_level_config(const std::string& text);
std::vector<LevelSpec> load_level_config(const std::string& path);

}  // namespace mobility
