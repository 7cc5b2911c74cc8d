#pragma once

// File writers shared by the harness commands.

#include <string>
#include <vector>

#include "fluidnet/harness.hpp"

namespace fluidnet::report {

/// %.17g
std::string num(double v);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// Tail rows (direction_c1, x, tail_estimate, ci_halfwidth) followed by a
/// blank line and the summary block.
std::string simulation_csv(const PathStats& stats, double horizon, const std::string& seed_label);

std::string bounds_csv(const std::vector<BoundReport>& reports);
std::string verdicts_csv(const std::vector<Verdict>& verdicts);

}  // namespace fluidnet::report
