#pragma once

#include "mobility/trajectory.hpp"
#include "mobility/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mobility {

struct SpeedResult {
    JointId joint;
    double mean_speed = 0.0;     // m/s
    std::size_t n_intervals = 0; // intervals that entered the mean
    std::size_t n_excluded = 0;  // jittered intervals dropped from the mean
};

/// Mean of instantaneous speeds |p_i - p_(i-1)| / (t_i - t_(i-1)) over
/// consecutive same-segment samples. Intervals crossing a declared segment
/// split are skipped, as are intervals whose spacing deviates more than 50%
/// from the nominal frame time (timestamp jitter guard); the latter are
/// counted in n_excluded. Throws "insufficient samples" when nothing usable
/// remains.
SpeedResult mean_speed(const JointTrajectory& traj);

struct RomResult {
    JointId joint;
    Vec3 centroid = Vec3::Zero();
    double rom = 0.0;  // meters
};

/// Root-mean-square distance of the samples from their centroid:
/// c = mean(p), rom = sqrt(mean |p_i - c|^2). Zero iff every sample
/// coincides.
RomResult range_of_motion(const JointTrajectory& traj);

struct WorkspaceResult {
    JointId joint;
    double volume = 0.0;  // cubic meters
    bool degenerate = false;
};

/// Volume of the convex hull of the visited positions, as (1/3) sum of facet
/// area times perpendicular distance from the hull-vertex centroid to the
/// facet plane. Point/line/plane-confined trajectories are degenerate and
/// report zero volume with the flag set.
WorkspaceResult workspace_volume(const JointTrajectory& traj);

struct MetricCell {
    std::string level;
    JointId joint;
    std::optional<double> mean_speed;  // m/s
    std::optional<double> rom;         // m
    std::optional<double> volume;      // m^3
    bool degenerate_volume = false;
    std::string error;  // reason the cell is empty, when it is
};

struct MetricsTable {
    std::vector<MetricCell> cells;  // level-major, joint-minor order

    const MetricCell* find(const std::string& level, const JointId& joint) const;
};

/// Runs all three metrics for each (window, joint) pair: extract the window,
/// heal dropouts, measure. Per-cell failures (joint absent, empty window)
/// become empty cells carrying the reason instead of aborting the table.
MetricsTable level_metrics(const std::vector<PoseSample>& samples,
                           const LevelSegmentation& segmentation,
                           const std::vector<JointId>& joints, double max_gap_s = 0.2);

/// CSV `level,joint,mean_speed_mps,rom_m,volume_m3,flags`; empty fields for
/// empty cells, flags holds "degenerate" and/or the error reason.
std::string metrics_csv(const MetricsTable& table);

}  // namespace mobility
