#include "sscmpc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace sscmpc {

namespace {

struct Mapper {
    double x0, x1, y0, y1;          // data range
    double px, py, pw, ph;          // pixel viewport
    double x(double v) const { return px + (v - x0) / (x1 - x0 + 1e-300) * pw; }
    double y(double v) const { return py + ph - (v - y0) / (y1 - y0 + 1e-300) * ph; }
};

std::string num(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

void polyline(std::ostringstream& out, const std::vector<std::pair<double, double>>& pts,
              const Mapper& m, const std::string& color, double width, bool dashed = false) {
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"";
    if (dashed) out << " stroke-dasharray=\"6,5\"";
    out << " points=\"";
    for (const auto& [x, y] : pts) out << num(m.x(x)) << "," << num(m.y(y)) << " ";
    out << "\"/>\n";
}

void text(std::ostringstream& out, double x, double y, const std::string& s, int size = 12,
          const std::string& anchor = "start") {
    out << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << size
        << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">" << s << "</text>\n";
}

}  // namespace

std::string summary_svg(const std::vector<ReportRow>& rows, const EpisodeTrace& run0,
                        const RoadGeometry& road) {
    const double W = 860, H = 620;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // --- top panel: mean J100 vs beta_ta, one series per beta_ex ---
    if (!rows.empty()) {
        double bmin = rows[0].beta_ta, bmax = rows[0].beta_ta;
        double jmin = rows[0].report.mean_j100, jmax = jmin;
        for (const ReportRow& r : rows) {
            bmin = std::min(bmin, r.beta_ta);
            bmax = std::max(bmax, r.beta_ta);
            jmin = std::min(jmin, r.report.mean_j100);
            jmax = std::max(jmax, r.report.mean_j100);
        }
        if (bmax == bmin) { bmin -= 0.01; bmax += 0.01; }
        const double pad = 0.05 * (jmax - jmin + 1.0);
        Mapper m{bmin, bmax, jmin - pad, jmax + pad, 70, 30, W - 110, 220};

        out << "<rect x=\"" << m.px << "\" y=\"" << m.py << "\" width=\"" << m.pw
            << "\" height=\"" << m.ph << "\" fill=\"none\" stroke=\"black\"/>\n";
        text(out, W / 2, 20, "mean closed-loop cost J100 vs task risk parameter", 14, "middle");
        text(out, W / 2, m.py + m.ph + 35, "beta_ta", 12, "middle");

        std::map<double, std::vector<std::pair<double, double>>> series;
        for (const ReportRow& r : rows) series[r.beta_ex].push_back({r.beta_ta, r.report.mean_j100});
        const char* colors[] = {"#c0392b", "#2980b9", "#27ae60", "#8e44ad"};
        int ci = 0;
        for (auto& [bex, pts] : series) {
            std::sort(pts.begin(), pts.end());
            const std::string color = colors[ci % 4];
            polyline(out, pts, m, color, 2.0);
            for (const auto& [x, y] : pts)
                out << "<circle cx=\"" << num(m.x(x)) << "\" cy=\"" << num(m.y(y))
                    << "\" r=\"4\" fill=\"" << color << "\"/>\n";
            text(out, m.px + m.pw - 5, m.py + 16 + 15 * ci, "beta_ex=" + num(bex), 11, "end");
            ++ci;
        }
        text(out, m.px - 8, m.py + 12, num(jmax), 10, "end");
        text(out, m.px - 8, m.py + m.ph, num(jmin), 10, "end");
        text(out, m.px, m.py + m.ph + 18, num(bmin), 10, "middle");
        text(out, m.px + m.pw, m.py + m.ph + 18, num(bmax), 10, "middle");
    }

    // --- bottom panel: x-y trajectories of run 0 ---
    if (!run0.steps.empty()) {
        double xmin = run0.steps.front().ev.x, xmax = xmin;
        for (const StepRecord& rec : run0.steps) {
            xmin = std::min(xmin, rec.ev.x);
            xmax = std::max(xmax, rec.ev.x);
            for (const AgentState& tv : rec.tvs) {
                xmin = std::min(xmin, tv.x);
                xmax = std::max(xmax, tv.x);
            }
        }
        Mapper m{xmin - 10, xmax + 10, road.y_min() - 1, road.y_max() + 1, 70, 330, W - 110, 240};

        out << "<rect x=\"" << m.px << "\" y=\"" << m.py << "\" width=\"" << m.pw
            << "\" height=\"" << m.ph << "\" fill=\"none\" stroke=\"black\"/>\n";
        text(out, W / 2, 320, "vehicle trajectories, run 0 (EV red, TVs blue)", 14, "middle");
        text(out, W / 2, m.py + m.ph + 35, "x (m)", 12, "middle");

        // lane boundaries
        for (int l = 0; l <= road.lanes; ++l) {
            const double y = road.y_min() + l * road.lane_width;
            std::vector<std::pair<double, double>> lane = {{m.x0, y}, {m.x1, y}};
            polyline(out, lane, m, "#999999", 1.0, l != 0 && l != road.lanes);
        }

        const std::size_t n_tv = run0.steps.front().tvs.size();
        for (std::size_t i = 0; i < n_tv; ++i) {
            std::vector<std::pair<double, double>> pts;
            for (const StepRecord& rec : run0.steps) pts.push_back({rec.tvs[i].x, rec.tvs[i].y});
            pts.push_back({run0.tvs_final[i].x, run0.tvs_final[i].y});
            polyline(out, pts, m, "#2980b9", 1.5);
            text(out, m.x(pts.front().first), m.y(pts.front().second) - 5, "TV" + num(i + 1), 10);
        }
        std::vector<std::pair<double, double>> ev;
        for (const StepRecord& rec : run0.steps) ev.push_back({rec.ev.x, rec.ev.y});
        ev.push_back({run0.ev_final.x, run0.ev_final.y});
        polyline(out, ev, m, "#c0392b", 2.5);
        text(out, m.x(ev.front().first), m.y(ev.front().second) - 5, "EV", 10);
    }

    out << "</svg>\n";
    return out.str();
}

void write_summary_svg(const std::string& path, const std::vector<ReportRow>& rows,
                       const EpisodeTrace& run0, const RoadGeometry& road) {
    write_text_file(path, summary_svg(rows, run0, road));
}

}  // namespace sscmpc
