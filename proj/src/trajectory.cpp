#include "mobility/trajectory.hpp"

#include "mobility/format.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mobility {

JointTrajectory extract_trajectory(const std::vector<PoseSample>& samples, const JointId& joint,
                                   double start_t, double end_t, double nominal_rate_hz) {
    if (!(start_t < end_t)) {
        throw ValidationError("degenerate window [" + format_double(start_t) + ", " +
                              format_double(end_t) + ")");
    }
    JointTrajectory traj;
    traj.joint = joint;
    traj.nominal_rate_hz = nominal_rate_hz;
    bool tracked_anywhere = false;
    for (const auto& s : samples) {
        const Vec3* p = s.find(joint);
        if (!p) continue;
        tracked_anywhere = true;
        if (s.t >= start_t && s.t < end_t) traj.samples.push_back({s.t, *p});
    }
    if (!tracked_anywhere) throw ValidationError("joint not tracked: " + joint.code());
    if (traj.samples.empty()) {
        throw ValidationError("no samples in window [" + format_double(start_t) + ", " +
                              format_double(end_t) + ") for joint " + joint.code());
    }
    return traj;
}

FillResult fill_gaps(const JointTrajectory& traj, double max_gap_s) {
    if (!(max_gap_s > 0.0)) throw ValidationError("max_gap must be positive");
    traj.validate();

    const double dt_nom = 1.0 / traj.nominal_rate_hz;
    const double gap_threshold = 1.5 * dt_nom;

    FillResult result;
    result.trajectory.joint = traj.joint;
    result.trajectory.nominal_rate_hz = traj.nominal_rate_hz;
    auto& out = result.trajectory.samples;
    std::vector<std::size_t> starts = {0};

    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        if (i > 0) {
            const TimedPoint& a = traj.samples[i - 1];
            const TimedPoint& b = traj.samples[i];
            const double dt = b.t - a.t;
            if (traj.is_segment_start(i)) {
                starts.push_back(out.size());
            } else if (dt > gap_threshold) {
                if (dt <= max_gap_s) {
                    auto n_insert =
                        static_cast<std::size_t>(std::lround(dt / dt_nom)) - 1;
                    for (std::size_t k = 1; k <= n_insert; ++k) {
                        double f = static_cast<double>(k) / static_cast<double>(n_insert + 1);
                        out.push_back({a.t + f * dt, a.p + f * (b.p - a.p)});
                    }
                    result.report.interpolated_samples += n_insert;
                } else {
                    starts.push_back(out.size());
                    result.report.splits.push_back({traj.joint, a.t, b.t, dt});
                }
            }
        }
        out.push_back(traj.samples[i]);
    }
    result.trajectory.segment_starts = std::move(starts);
    return result;
}

std::string gap_report_csv(const GapReport& report) {
    std::ostringstream out;
    out << "joint,start_t,end_t,duration\n";
    for (const auto& g : report.splits) {
        out << g.joint.code() << "," << format_double(g.start_t) << "," << format_double(g.end_t)
            << "," << format_double(g.duration) << "\n";
    }
    return out.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

LevelSegmentation parse_segmentation_csv(const std::string& text) {
    LevelSegmentation seg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (line_no == 1 && !fields.empty() && fields[0] == "label") continue;
        if (fields.size() != 3) {
            throw ValidationError("segmentation line " + std::to_string(line_no) +
                                  ": expected label,start_t,end_t");
        }
        LevelWindow w;
        w.label = fields[0];
        try {
            w.start_t = std::stod(fields[1]);
            w.end_t = std::stod(fields[2]);
        } catch (const std::exception&) {
            throw ValidationError("segmentation line " + std::to_string(line_no) +
                                  ": bad number");
        }
        seg.windows.push_back(std::move(w));
    }
    seg.validate();
    return seg;
}

LevelSegmentation load_segmentation(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open segmentation: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_segmentation_csv(buf.str());
}

std::string segmentation_csv(const LevelSegmentation& seg) {
    std::ostringstream out;
    out << "label,start_t,end_t\n";
    for (const auto& w : seg.windows) {
        out << w.label << "," << format_double(w.start_t) << "," << format_double(w.end_t) << "\n";
    }
    return out.str();
}

}  // namespace mobility
