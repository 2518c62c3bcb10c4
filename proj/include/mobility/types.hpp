#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mobility {

// All positions are meters in a right-handed, Y-up frame whose origin is the
// headset pose at session start. Timestamps are seconds since session start.
using Vec3 = Eigen::Vector3d;

/// Input that violates a documented contract (bad file content, bad arguments).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Filesystem or stream failure.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Identifier of a tracked joint. The six core upper-body joints have fixed
/// short codes (LH, RH, LE, RE, LS, RS); any other code is carried through
/// untouched as an extension joint. Codes are case-sensitive and serialize
/// exactly as stored.
class JointId {
public:
    JointId() = default;
    explicit JointId(std::string code) : code_(std::move(code)) {}

    const std::string& code() const { return code_; }
    bool is_core() const;

    static JointId left_hand() { return JointId("LH"); }
    static JointId right_hand() { return JointId("RH"); }
    static JointId left_elbow() { return JointId("LE"); }
    static JointId right_elbow() { return JointId("RE"); }
    static JointId left_shoulder() { return JointId("LS"); }
    static JointId right_shoulder() { return JointId("RS"); }

    /// The six core joints in canonical order: LH, RH, LE, RE, LS, RS.
    static const std::vector<JointId>& core();

    friend bool operator==(const JointId&, const JointId&) = default;
    friend std::strong_ordering operator<=>(const JointId&, const JointId&) = default;

private:
    std::string code_;
};

/// One timestamped snapshot of tracked joint positions.
struct PoseSample {
    double t = 0.0;
    std::map<JointId, Vec3> joints;

    /// Position of `id` or nullptr when the joint is absent from this sample.
    const Vec3* find(const JointId& id) const;
};

struct TimedPoint {
    double t;
    Vec3 p;
};

/// Ordered samples of one joint over a window. `segment_starts` lists the
/// indices that begin a contiguous segment; index 0 is always one. Extra
/// entries appear only after a gap split (see fill_gaps). Metrics that use
/// consecutive-sample differences must not difference across a segment start.
struct JointTrajectory {
    JointId joint;
    std::vector<TimedPoint> samples;
    double nominal_rate_hz = 50.0;
    std::vector<std::size_t> segment_starts = {0};

    std::size_t size() const { return samples.size(); }
    bool is_segment_start(std::size_t i) const;

    /// Throws ValidationError unless there is >= 1 sample, timestamps are
    /// strictly increasing, and every coordinate is finite.
    void validate() const;
};

struct LevelWindow {
    std::string label;  // L1..L4 for game levels; free-form for motion tasks
    double start_t = 0.0;
    double end_t = 0.0;
};

/// Ordered, non-overlapping time windows labelling what was active when.
struct LevelSegmentation {
    std::vector<LevelWindow> windows;

    /// Ordering, non-overlap, and non-degenerate windows.
    void validate() const;

    /// Additionally bounds each window's duration by the configured level
    /// duration plus `slack_s`. `max_duration` maps label -> duration;
    /// unknown labels are not checked.
    void validate_durations(const std::map<std::string, double>& max_duration,
                            double slack_s = 1.0) const;
};

}  // namespace mobility
