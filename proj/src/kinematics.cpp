#include "mobility/kinematics.hpp"

#include "mobility/convex_hull.hpp"
#include "mobility/format.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mobility {

SpeedResult mean_speed(const JointTrajectory& traj) {
    traj.validate();
    const double dt_nominal = 1.0 / traj.nominal_rate_hz;

    SpeedResult r;
    r.joint = traj.joint;
    double sum = 0.0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        if (traj.is_segment_start(i)) continue;  // never difference across a split
        double dt = traj.samples[i].t - traj.samples[i - 1].t;
        if (std::fabs(dt - dt_nominal) > 0.5 * dt_nominal) {
            ++r.n_excluded;
            continue;
        }
        sum += (traj.samples[i].p - traj.samples[i - 1].p).norm() / dt;
        ++r.n_intervals;
    }
    if (r.n_intervals == 0) throw ValidationError("insufficient samples");
    r.mean_speed = sum / static_cast<double>(r.n_intervals);
    return r;
}

RomResult range_of_motion(const JointTrajectory& traj) {
    traj.validate();
    const double n = static_cast<double>(traj.size());

    RomResult r;
    r.joint = traj.joint;
    // Work relative to the first sample: coincident samples then give an
    // exactly zero spread, and far-from-origin data loses no precision.
    const Vec3 anchor = traj.samples.front().p;
    Vec3 offset = Vec3::Zero();
    for (const TimedPoint& s : traj.samples) offset += s.p - anchor;
    offset /= n;
    r.centroid = anchor + offset;
    double ss = 0.0;
    for (const TimedPoint& s : traj.samples) ss += (s.p - anchor - offset).squaredNorm();
    r.rom = std::sqrt(ss / n);
    return r;
}

WorkspaceResult workspace_volume(const JointTrajectory& traj) {
    traj.validate();

    std::vector<Vec3> points;
    points.reserve(traj.size());
    for (const TimedPoint& s : traj.samples) points.push_back(s.p);

    WorkspaceResult r;
    r.joint = traj.joint;
    HullResult hull = convex_hull(points);
    if (hull.degenerate()) {
        r.degenerate = true;
        r.volume = 0.0;
        return r;
    }
    r.volume = hull.hull->cone_volume(hull.hull->vertex_centroid());
    return r;
}

const MetricCell* MetricsTable::find(const std::string& level, const JointId& joint) const {
    for (const MetricCell& c : cells) {
        if (c.level == level && c.joint == joint) return &c;
    }
    return nullptr;
}

MetricsTable level_metrics(const std::vector<PoseSample>& samples,
                           const LevelSegmentation& segmentation,
                           const std::vector<JointId>& joints, double max_gap_s) {
    segmentation.validate();

    MetricsTable table;
    for (const LevelWindow& w : segmentation.windows) {
        for (const JointId& joint : joints) {
            MetricCell cell;
            cell.level = w.label;
            cell.joint = joint;
            try {
                JointTrajectory traj =
                    extract_trajectory(samples, joint, w.start_t, w.end_t);
                FillResult filled = fill_gaps(traj, max_gap_s);

                // A speed failure (e.g. one lone sample) must not take the
                // dispersion metrics down with it.
                try {
                    cell.mean_speed = mean_speed(filled.trajectory).mean_speed;
                } catch (const ValidationError& e) {
                    cell.error = e.what();
                }
                cell.rom = range_of_motion(filled.trajectory).rom;
                WorkspaceResult ws = workspace_volume(filled.trajectory);
                cell.volume = ws.volume;
                cell.degenerate_volume = ws.degenerate;
            } catch (const ValidationError& e) {
                cell.mean_speed.reset();
                cell.rom.reset();
                cell.volume.reset();
                cell.error = e.what();
            }
            table.cells.push_back(std::move(cell));
        }
    }
    return table;
}

std::string metrics_csv(const MetricsTable& table) {
    std::ostringstream out;
    out << "level,joint,mean_speed_mps,rom_m,volume_m3,flags\n";
    for (const MetricCell& c : table.cells) {
        out << c.level << ',' << c.joint.code() << ',';
        if (c.mean_speed) out << format_double(*c.mean_speed);
        out << ',';
        if (c.rom) out << format_double(*c.rom);
        out << ',';
        if (c.volume) out << format_double(*c.volume);
        out << ',';
        std::string flags;
        if (c.degenerate_volume) flags = "degenerate";
        if (!c.error.empty()) {
            if (!flags.empty()) flags += ';';
            std::string reason = c.error;
            std::replace(reason.begin(), reason.end(), ',', ';');
            flags += reason;
        }
        out << flags << '\n';
    }
    return out.str();
}

}  // namespace mobility
