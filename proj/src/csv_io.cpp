#include "sscmpc/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace sscmpc {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::string mode_name(ControllerMode mode) {
    switch (mode) {
        case ControllerMode::SSC: return "ssc";
        case ControllerMode::SmpcOnly: return "smpc_only";
        case ControllerMode::ScmpcOnly: return "scmpc_only";
    }
    return "?";
}

std::string status_name(OcpStatus status) {
    switch (status) {
        case OcpStatus::Optimal: return "optimal";
        case OcpStatus::Infeasible: return "infeasible";
        case OcpStatus::RecoveredWithSlack: return "recovered";
        case OcpStatus::InfeasibleRecoveryFailed: return "recovery_failed";
    }
    return "?";
}

std::string trace_csv(const EpisodeTrace& trace) {
    const std::size_t n_tv = trace.tvs_final.size();
    std::ostringstream out;
    out << "step,ev_x,ev_vx,ev_y,ev_vy,ux,uy,status,slack";
    for (std::size_t i = 0; i < n_tv; ++i) {
        out << ",tv" << i << "_x,tv" << i << "_vx,tv" << i << "_y,tv" << i << "_vy";
    }
    out << "\n";

    auto write_state = [&](const AgentState& s) {
        out << "," << fmt(s.x) << "," << fmt(s.vx) << "," << fmt(s.y) << "," << fmt(s.vy);
    };

    for (const StepRecord& rec : trace.steps) {
        out << rec.step;
        write_state(rec.ev);
        out << "," << fmt(rec.input.ux) << "," << fmt(rec.input.uy) << ","
            << status_name(rec.status) << "," << fmt(rec.slack_total);
        for (const AgentState& tv : rec.tvs) write_state(tv);
        out << "\n";
    }
    out << trace.steps.size();
    write_state(trace.ev_final);
    out << ",0,0,end,0";
    for (const AgentState& tv : trace.tvs_final) write_state(tv);
    out << "\n";
    return out.str();
}

std::string report_csv(const std::vector<ReportRow>& rows) {
    std::ostringstream out;
    out << "mode,beta_ta,beta_ex,runs,collisions,mean_j100,mean_infeasible_ocp_steps,"
           "mean_infeasible_rec_steps,base_seed\n";
    for (const ReportRow& r : rows) {
        out << r.mode << "," << fmt(r.beta_ta) << "," << fmt(r.beta_ex) << "," << r.report.runs
            << "," << r.report.collisions << "," << fmt(r.report.mean_j100) << ","
            << fmt(r.report.mean_infeasible_ocp_steps) << ","
            << fmt(r.report.mean_infeasible_recovery_steps) << "," << r.base_seed << "\n";
    }
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << content;
    if (!f) throw IoError("write failed: " + path);
}

void write_trace_csv(const std::string& path, const EpisodeTrace& trace) {
    write_text_file(path, trace_csv(trace));
}

void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows) {
    write_text_file(path, report_csv(rows));
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        rows.push_back(std::move(fields));
    }
    return rows;
}

double trace_csv_cost(const std::string& csv_text, const Mat4& Q, const Mat2& R,
                      const RoadGeometry& road, double v_ref) {
    const auto rows = parse_csv(csv_text);
    if (rows.size() < 3) throw IoError("trace_csv_cost: empty trace");
    // rows[0] is the header; data row 1+k holds the step-k state and input
    double j = 0.0;
    for (std::size_t r = 1; r + 1 < rows.size(); ++r) {
        const double y_k = std::stod(rows[r][3]);
        const Vec4 ref(0.0, v_ref, road.lane_center(road.nearest_lane(y_k)), 0.0);
        const Vec4 next(std::stod(rows[r + 1][1]), std::stod(rows[r + 1][2]),
                        std::stod(rows[r + 1][3]), std::stod(rows[r + 1][4]));
        const Vec4 dxi = next - ref;
        const Vec2 u(std::stod(rows[r][5]), std::stod(rows[r][6]));
        j += dxi.dot(Q * dxi) + u.dot(R * u);
    }
    return j;
}

}  // namespace sscmpc
