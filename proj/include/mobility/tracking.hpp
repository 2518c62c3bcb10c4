#pragma once

#include "mobility/types.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mobility {

/// Time-associated sample pairs between an estimated and a reference
/// trajectory of the same joint. Matches are one-to-one and ordered in time.
struct TrajectoryPair {
    JointTrajectory estimated;
    JointTrajectory reference;
    std::vector<std::pair<std::size_t, std::size_t>> matches;  // (est, ref) indices
    std::size_t unmatched_estimated = 0;
    std::size_t unmatched_reference = 0;
};

/// Greedy nearest-timestamp association, walking both streams once. Each
/// sample is used at most once; a pair is kept when |dt| <= assoc_tol.
/// Equidistant candidates resolve to the earlier reference sample. Throws
/// "no temporal overlap" when nothing matches.
TrajectoryPair associate(const JointTrajectory& estimated, const JointTrajectory& reference,
                         double assoc_tol = 0.010);

struct RigidTransform {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Vec3 translation = Vec3::Zero();

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

enum class RegisterMode { none, translation, rigid };

std::string to_string(RegisterMode mode);
RegisterMode register_mode_from_string(const std::string& name);

/// Least-squares alignment of the estimated points onto the reference over
/// the matched pairs: `none` is the identity, `translation` shifts by the
/// mean offset, `rigid` solves min sum |R p + t - q|^2 in closed form via
/// the covariance SVD (proper rotation enforced). Rigid needs >= 3 matches
/// spanning more than a line; otherwise throws "rank deficient".
RigidTransform register_pair(const TrajectoryPair& pair, RegisterMode mode);

struct TrackingErrorStats {
    JointId joint;
    std::string task;
    double mean = 0.0;  // meters
    double sd = 0.0;    // population standard deviation, meters
    double rmse = 0.0;  // meters
    double max = 0.0;   // meters
    std::size_t n = 0;  // matched pairs

    /// rmse^2 = mean^2 + sd^2 under the population convention used here.
};

/// Per-match Euclidean error |T(est) - ref| summarized over all matches.
TrackingErrorStats ape(const TrajectoryPair& pair, const RigidTransform& transform);

struct ApeCell {
    JointId joint;
    std::string task;
    std::optional<TrackingErrorStats> stats;
    std::string error;  // reason when stats is empty
};

struct ApeReport {
    std::vector<ApeCell> cells;  // task-major, joint-minor

    const ApeCell* find(const std::string& task, const JointId& joint) const;
};

/// Associates and scores every (task window, joint) cell between two pose
/// streams. Registration (per cell) follows `mode`. Cells that cannot be
/// evaluated carry the reason instead of aborting the report.
ApeReport ape_report(const std::vector<PoseSample>& estimated,
                     const std::vector<PoseSample>& reference,
                     const LevelSegmentation& tasks, const std::vector<JointId>& joints,
                     RegisterMode mode = RegisterMode::none, double assoc_tol = 0.010);

/// CSV `task,joint,mean_m,sd_m,rmse_m,max_m,n,flags`.
std::string ape_report_csv(const ApeReport& report);

}  // namespace mobility
