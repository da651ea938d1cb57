#pragma once

#include <string>
#include <vector>

#include "sscmpc/ocp.hpp"
#include "sscmpc/simulator.hpp"

namespace sscmpc {

struct ReportRow {
    std::string mode;
    double beta_ta = 0.0;
    double beta_ex = 0.0;
    McReport report;
    std::uint64_t base_seed = 0;
};

std::string mode_name(ControllerMode mode);
std::string status_name(OcpStatus status);

/// trace CSV: `step,ev_x,ev_vx,ev_y,ev_vy,ux,uy,status,slack` followed by one
/// `tv<i>_x,tv<i>_vx,tv<i>_y,tv<i>_vy` block per TV. Rows 0..n-1 hold the
/// pre-step state with the applied input; a final row holds the terminal
/// state with status `end`.
std::string trace_csv(const EpisodeTrace& trace);
void write_trace_csv(const std::string& path, const EpisodeTrace& trace);

/// report CSV: one row per (mode, beta_ta, beta_ex) with collision and cost
/// aggregates.
std::string report_csv(const std::vector<ReportRow>& rows);
void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows);

/// Minimal CSV reader used by the round-trip tests.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

/// Recomputes the closed-loop cost from an exported trace file given the
/// tracking weights and the reference rule (v_ref plus nearest lane center).
double trace_csv_cost(const std::string& csv_text, const Mat4& Q, const Mat2& R,
                      const RoadGeometry& road, double v_ref);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace sscmpc
