#pragma once

#include <string>
#include <vector>

#include "sscmpc/csv.hpp"
#include "sscmpc/simulator.hpp"

namespace sscmpc {

/// Self-contained vector plot: closed-loop cost against the task risk
/// parameter (one series per beta_ex) on top, x-y vehicle trajectories of the
/// given run below.
std::string summary_svg(const std::vector<ReportRow>& rows, const EpisodeTrace& run0,
                        const RoadGeometry& road);

void write_summary_svg(const std::string& path, const std::vector<ReportRow>& rows,
                       const EpisodeTrace& run0, const RoadGeometry& road);

}  // namespace sscmpc
