#pragma once

#include "mobility/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mobility {

/// Patient-specific playable region from the three calibration poses. The
/// play plane sits at a fixed depth; targets live on it.
struct MovementBoundary {
    double rest_y = 0.0;
    double overhead_y = 0.0;
    double lateral_left_x = 0.0;
    double lateral_right_x = 0.0;
    double forward_z = 0.0;

    double x_span() const { return lateral_right_x - lateral_left_x; }
    double y_span() const { return overhead_y - rest_y; }
    double x_center() const { return 0.5 * (lateral_left_x + lateral_right_x); }
    /// Reflection across the vertical midline of the play area.
    Vec3 mirror_x(const Vec3& p) const;
    bool contains(const Vec3& p, double slack = 1e-9) const;

    void validate() const;
};

/// rest pose -> rest_y (mean hand height); overhead pose -> overhead_y (max
/// hand height); lateral pose -> left/right extents (min/max hand x);
/// forward_z = mean hand depth over all three poses. A vertical or lateral
/// range under 5 cm is not playable -> "insufficient range".
MovementBoundary calibrate(const PoseSample& rest, const PoseSample& overhead,
                           const PoseSample& lateral);

enum class MovementType { Wrist, Lateral, Bilateral, Overhead };

std::string to_string(MovementType type);
MovementType movement_type_from_string(const std::string& name);

struct LevelSpec {
    std::string id;  // L1..L4
    double bpm = 0.0;
    MovementType movement_type = MovementType::Wrist;
    double hold_min_s = 0.0;
    double hold_max_s = 0.0;
    double duration_s = 120.0;

    double beat_interval() const { return 60.0 / bpm; }
    void validate() const;

    /// The stock four-level progression: L1 77 bpm wrist with 4-6 s holds,
    /// L2 105 lateral 6-8 s, L3 112 bilateral 8-10 s, L4 140 overhead
    /// 10-12 s, two minutes each.
    static LevelSpec standard(const std::string& id);
    static std::vector<LevelSpec> standard_four();
};

enum class TargetKind { Line, Hold };
enum class Hand { Left, Right, Both };

std::string to_string(Hand hand);

/// One scripted target. Lines sweep from path_start to path_end between
/// appear_t and deadline_t; holds keep path_start == path_end and demand
/// hold_duration seconds of continuous contact before deadline_t. For
/// Both-handed targets the stored path is the right hand's; the left hand
/// works the x-mirrored path.
struct TargetEvent {
    TargetKind kind = TargetKind::Line;
    Hand hand = Hand::Left;
    Vec3 path_start = Vec3::Zero();
    Vec3 path_end = Vec3::Zero();
    double appear_t = 0.0;
    double deadline_t = 0.0;
    double hold_duration = 0.0;  // holds only

    /// Position along the path at time t (clamped to the endpoints).
    Vec3 position_at(double t) const;
};

struct TargetScript {
    LevelSpec level;
    std::vector<TargetEvent> events;

    /// Event ordering, beat alignment, in-boundary paths, hold durations
    /// within the level's range, last deadline within the level duration.
    void validate(const MovementBoundary& boundary) const;
};

/// Deterministic schedule for one level: the beat grid (60/bpm) is tiled
/// with groups of travel lines followed by one hold, shaped by the movement
/// type. Lines occupy two beats (one for a short final filler), holds two
/// beats of approach plus the hold rounded up to whole beats. Hold durations
/// cycle min, min+1, ..., max (1 s steps), starting at an offset given by
/// the seed. A non-positive duration yields an empty script.
TargetScript build_level_schedule(const LevelSpec& spec, const MovementBoundary& boundary,
                                  std::uint64_t seed);

enum class SessionEventKind {
    Hit,
    Miss,
    HoldComplete,
    HoldBroken,
    Milestone25,
    Milestone50,
    Milestone75,
    LevelComplete,
};

std::string to_string(SessionEventKind kind);

struct SessionEvent {
    double t = 0.0;
    SessionEventKind kind = SessionEventKind::Hit;
    int target_index = -1;  // -1 for milestones and LevelComplete
    std::string detail;     // hand code for target events
};

/// Replays a pose stream against a script. Feed samples in time order via
/// step(); finish() resolves whatever is still open and emits LevelComplete.
///
/// A line is Hit the first time the required hand is within capture_radius
/// of the target's current path point at a sample with t < deadline_t, else
/// Miss at the deadline. A hold completes after hold_duration seconds of
/// unbroken contact with the hold point (contact may be re-attempted until
/// the deadline); otherwise it resolves HoldBroken at the deadline.
/// Both-handed targets need both hands in contact at the same sample, the
/// left hand against the mirrored point. Milestones fire as the completion
/// fraction (targets caught / targets scripted) first reaches 25/50/75%.
class GameSession {
public:
    explicit GameSession(TargetScript script, MovementBoundary boundary,
                         double capture_radius = 0.10);

    /// Returns the events this sample caused, in order. Throws
    /// "time regression" when samples go backwards.
    std::vector<SessionEvent> step(const PoseSample& sample);

    /// Resolves still-open targets as missed at their deadlines and emits
    /// LevelComplete at the level duration. Idempotent.
    std::vector<SessionEvent> finish();

    const std::vector<SessionEvent>& events() const { return events_; }
    bool finished() const { return finished_; }
    double capture_radius() const { return capture_radius_; }

private:
    struct TargetState {
        bool resolved = false;
        bool succeeded = false;
        std::optional<double> contact_since;  // holds: start of current streak
    };

    void resolve_due(double now, std::vector<SessionEvent>& out);
    void resolve(std::size_t index, bool success, double at,
                 std::vector<SessionEvent>& out);
    bool in_contact(const TargetEvent& event, const PoseSample& sample, double t) const;

    TargetScript script_;
    MovementBoundary boundary_;
    double capture_radius_;
    std::vector<TargetState> states_;
    std::vector<SessionEvent> events_;
    std::size_t hit_count_ = 0;
    int milestones_fired_ = 0;
    double last_t_ = -1.0;
    bool finished_ = false;
};

struct CompletionSummary {
    std::string level_id;
    std::size_t targets_total = 0;
    std::size_t targets_hit = 0;  // lines hit + holds completed
    double completion_fraction = 0.0;
};

CompletionSummary summarize(const std::vector<SessionEvent>& events,
                            const TargetScript& script);

/// Line-delimited records, one target per line, deterministic bytes.
void serialize_script(const TargetScript& script, std::ostream& out);

/// Line-delimited records, one event per line, deterministic bytes.
void serialize_events(const std::vector<SessionEvent>& events, std::ostream& out);

}  // namespace mobility
