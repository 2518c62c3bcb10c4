#include "mobility/types.hpp"

#include <cmath>
#include <sstream>

namespace mobility {

const std::vector<JointId>& JointId::core() {
    static const std::vector<JointId> kCore = {
        left_hand(),     right_hand(),    left_elbow(),
        right_elbow(),   left_shoulder(), right_shoulder(),
    };
    return kCore;
}

bool JointId::is_core() const {
    for (const auto& j : core()) {
        if (j.code_ == code_) return true;
    }
    return false;
}

const Vec3* PoseSample::find(const JointId& id) const {
    auto it = joints.find(id);
    return it == joints.end() ? nullptr : &it->second;
}

bool JointTrajectory::is_segment_start(std::size_t i) const {
    for (std::size_t s : segment_starts) {
        if (s == i) return true;
    }
    return false;
}

void JointTrajectory::validate() const {
    if (samples.empty()) throw ValidationError("trajectory has no samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!s.p.allFinite() || !std::isfinite(s.t)) {
            throw ValidationError("invalid coordinate in trajectory sample " + std::to_string(i));
        }
        if (i > 0 && samples[i - 1].t >= s.t) {
            throw ValidationError("time regression in trajectory at sample " + std::to_string(i));
        }
    }
}

void LevelSegmentation::validate() const {
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto& w = windows[i];
        if (!(w.start_t < w.end_t)) {
            throw ValidationError("degenerate window for " + w.label);
        }
        if (i > 0 && windows[i - 1].end_t > w.start_t) {
            throw ValidationError("overlapping windows at " + w.label);
        }
    }
}

void LevelSegmentation::validate_durations(const std::map<std::string, double>& max_duration,
                                           double slack_s) const {
    validate();
    for (const auto& w : windows) {
        auto it = max_duration.find(w.label);
        if (it == max_duration.end()) continue;
        double d = w.end_t - w.start_t;
        if (d > it->second + slack_s) {
            std::ostringstream msg;
            msg << "window " << w.label << " lasts " << d << " s, longer than the configured "
                << it->second << " s level plus " << slack_s << " s slack";
            throw ValidationError(msg.str());
        }
    }
}

}  // namespace mobility
