#pragma once

#include "mobility/types.hpp"

#include <string>
#include <vector>

namespace mobility {

/// Samples with start_t <= t < end_t in which `joint` is present.
/// Throws ValidationError for a degenerate window, "joint not tracked" when
/// the joint appears in no sample at all, and "no samples in window" when the
/// joint is tracked but the window selects nothing.
JointTrajectory extract_trajectory(const std::vector<PoseSample>& samples, const JointId& joint,
                                   double start_t, double end_t, double nominal_rate_hz = 50.0);

struct GapRecord {
    JointId joint;
    double start_t = 0.0;  // last sample before the gap
    double end_t = 0.0;    // first sample after the gap
    double duration = 0.0;
};

struct GapReport {
    std::vector<GapRecord> splits;          // gaps too long to interpolate
    std::size_t interpolated_samples = 0;   // samples inserted into short gaps
    bool empty() const { return splits.empty() && interpolated_samples == 0; }
};

/// CSV with header `joint,start_t,end_t,duration`, one row per split gap.
std::string gap_report_csv(const GapReport& report);

struct FillResult {
    JointTrajectory trajectory;
    GapReport report;
};

/// Heals dropouts: a spacing wider than 1.5 nominal frames is a gap. Gaps no
/// longer than max_gap_s are filled with linearly interpolated samples at the
/// nominal rate; longer gaps split the trajectory into segments and are
/// listed in the report. Original samples are never moved or removed.
FillResult fill_gaps(const JointTrajectory& traj, double max_gap_s);

/// Segmentation files are CSV with header `label,start_t,end_t`.
LevelSegmentation parse_segmentation_csv(const std::string& text);
LevelSegmentation load_segmentation(const std::string& path);
std::string segmentation_csv(const LevelSegmentation& seg);

}  // namespace mobility
