#include "mobility/tracking.hpp"

#include "mobility/format.hpp"
#include "mobility/trajectory.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mobility {

TrajectoryPair associate(const JointTrajectory& estimated, const JointTrajectory& reference,
                         double assoc_tol) {
    estimated.validate();
    reference.validate();
    if (!(assoc_tol > 0.0)) throw ValidationError("assoc_tol must be positive");

    TrajectoryPair pair;
    pair.estimated = estimated;
    pair.reference = reference;

    std::size_t j = 0;
    for (std::size_t i = 0; i < estimated.size(); ++i) {
        double t = estimated.samples[i].t;
        while (j + 1 < reference.size() &&
               std::fabs(reference.samples[j + 1].t - t) <
                   std::fabs(reference.samples[j].t - t)) {
            ++j;
        }
        if (j < reference.size() && std::fabs(reference.samples[j].t - t) <= assoc_tol) {
            pair.matches.emplace_back(i, j);
            ++j;
            if (j == reference.size()) break;
        }
    }
    if (pair.matches.empty()) throw ValidationError("no temporal overlap");
    pair.unmatched_estimated = estimated.size() - pair.matches.size();
    pair.unmatched_reference = reference.size() - pair.matches.size();
    return pair;
}

std::string to_string(RegisterMode mode) {
    switch (mode) {
        case RegisterMode::none: return "none";
        case RegisterMode::translation: return "translation";
        case RegisterMode::rigid: return "rigid";
    }
    throw ValidationError("unknown registration mode");
}

RegisterMode register_mode_from_string(const std::string& name) {
    if (name == "none") return RegisterMode::none;
    if (name == "translation") return RegisterMode::translation;
    if (name == "rigid") return RegisterMode::rigid;
    throw ValidationError("unknown registration mode: " + name);
}

RigidTransform register_pair(const TrajectoryPair& pair, RegisterMode mode) {
    RigidTransform out;
    if (mode == RegisterMode::none) return out;
    if (pair.matches.empty()) throw ValidationError("no matches to register");

    const double n = static_cast<double>(pair.matches.size());
    Vec3 est_mean = Vec3::Zero(), ref_mean = Vec3::Zero();
    for (const auto& [i, j] : pair.matches) {
        est_mean += pair.estimated.samples[i].p;
        ref_mean += pair.reference.samples[j].p;
    }
    est_mean /= n;
    ref_mean /= n;

    if (mode == RegisterMode::translation) {
        out.translation = ref_mean - est_mean;
        return out;
    }

    if (pair.matches.size() < 3) throw ValidationError("rank deficient");
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (const auto& [i, j] : pair.matches) {
        h += (pair.estimated.samples[i].p - est_mean) *
             (pair.reference.samples[j].p - ref_mean).transpose();
    }
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // Collinear (or tighter) geometry leaves the rotation about the axis
    // unconstrained.
    if (sv(1) <= 1e-12 * std::max(sv(0), 1e-300)) throw ValidationError("rank deficient");

    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
    out.rotation = svd.matrixV() * d * svd.matrixU().transpose();
    out.translation = ref_mean - out.rotation * est_mean;
    return out;
}

TrackingErrorStats ape(const TrajectoryPair& pair, const RigidTransform& transform) {
    if (pair.matches.empty()) throw ValidationError("no matches");

    TrackingErrorStats stats;
    stats.joint = pair.estimated.joint;
    stats.n = pair.matches.size();

    std::vector<double> errors;
    errors.reserve(stats.n);
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& [i, j] : pair.matches) {
        double e = (transform.apply(pair.estimated.samples[i].p) -
                    pair.reference.samples[j].p)
                       .norm();
        errors.push_back(e);
        sum += e;
        sum_sq += e * e;
        stats.max = std::max(stats.max, e);
    }
    const double n = static_cast<double>(stats.n);
    stats.mean = sum / n;
    stats.rmse = std::sqrt(sum_sq / n);
    // Two-pass variance: the one-pass form cancels badly when errors are
    // near-constant.
    double ss = 0.0;
    for (double e : errors) ss += (e - stats.mean) * (e - stats.mean);
    stats.sd = std::sqrt(ss / n);
    return stats;
}

const ApeCell* ApeReport::find(const std::string& task, const JointId& joint) const {
    for (const ApeCell& c : cells) {
        if (c.task == task && c.joint == joint) return &c;
    }
    return nullptr;
}

ApeReport ape_report(const std::vector<PoseSample>& estimated,
                     const std::vector<PoseSample>& reference,
                     const LevelSegmentation& tasks, const std::vector<JointId>& joints,
                     RegisterMode mode, double assoc_tol) {
    tasks.validate();

    ApeReport report;
    for (const LevelWindow& w : tasks.windows) {
        for (const JointId& joint : joints) {
            ApeCell cell;
            cell.task = w.label;
            cell.joint = joint;
            try {
                JointTrajectory est = extract_trajectory(estimated, joint, w.start_t, w.end_t);
                JointTrajectory ref = extract_trajectory(reference, joint, w.start_t, w.end_t);
                TrajectoryPair pair = associate(est, ref, assoc_tol);
                TrackingErrorStats stats = ape(pair, register_pair(pair, mode));
                stats.task = w.label;
                cell.stats = stats;
            } catch (const ValidationError& e) {
                cell.error = e.what();
            }
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

std::string ape_report_csv(const ApeReport& report) {
    std::ostringstream out;
    out << "task,joint,mean_m,sd_m,rmse_m,max_m,n,flags\n";
    for (const ApeCell& c : report.cells) {
        out << c.task << ',' << c.joint.code() << ',';
        if (c.stats) {
            out << format_double(c.stats->mean) << ',' << format_double(c.stats->sd) << ','
                << format_double(c.stats->rmse) << ',' << format_double(c.stats->max) << ','
                << c.stats->n << ',';
        } else {
            out << ",,,,0,";
        }
        std::string reason = c.error;
        std::replace(reason.begin(), reason.end(), ',', ';');
        out << reason << '\n';
    }
    return out.str();
}

}  // namespace mobility
