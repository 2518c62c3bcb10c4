#include "mobility/game.hpp"

#include "mobility/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <utility>

namespace mobility {

namespace {

bool finite(const Vec3& v) {
    return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

// Target geometry per movement type, as fractions of the boundary spans.
// The contract fixes the envelope (wrist <= 25% of the extents, lateral full
// X on one side, overhead diagonals >= 80% of both extents, bilateral and
// overhead holds near the top); the exact fractions and group sizes inside
// that envelope are tuned so a compliant player's mean hand speed climbs
// level over level.
constexpr double kWristSpanFrac = 0.12;
constexpr double kWristHeightFrac = 0.08;
constexpr double kWristHandOffsetFrac = 0.03;
constexpr double kWristHoldOffsetFrac = 0.05;

constexpr double kLateralHeightFrac = 0.30;
constexpr double kLateralHoldInsetFrac = 0.04;

constexpr double kBilateralBackFrac = 0.15;
constexpr double kBilateralOutFrac = 0.30;
constexpr double kBilateralLowFrac = 0.15;
constexpr double kBilateralHighFrac = 0.55;

constexpr double kOverheadXFrac = 0.45;
constexpr double kOverheadLowFrac = 0.06;
constexpr double kOverheadHighFrac = 0.92;

constexpr double kHoldApartFrac = 0.10;
constexpr double kHoldHeightFrac = 0.88;

// A one-beat filler line at the very end of a schedule uses a shortened path.
constexpr double kTailShrink = 0.3;

int lines_per_group(MovementType type) {
    switch (type) {
        case MovementType::Wrist: return 2;
        case MovementType::Lateral: return 1;
        case MovementType::Bilateral: return 2;
        case MovementType::Overhead: return 3;
    }
    throw ValidationError("unknown movement type");
}

void line_path(MovementType type, const MovementBoundary& bd, int line_index,
               Hand& hand, Vec3& start, Vec3& end) {
    const double xs = bd.x_span();
    const double ys = bd.y_span();
    const double cx = bd.x_center();
    const double fz = bd.forward_z;
    const bool left = line_index % 2 == 0;
    const bool reverse = (line_index / 2) % 2 == 1;

    switch (type) {
        case MovementType::Wrist: {
            hand = left ? Hand::Left : Hand::Right;
            const double hcx = cx + (left ? -1.0 : 1.0) * kWristHandOffsetFrac * xs;
            const double w = 0.5 * kWristSpanFrac * xs;
            const double y = bd.rest_y + kWristHeightFrac * ys;
            start = Vec3(hcx - w, y, fz);
            end = Vec3(hcx + w, y, fz);
            break;
        }
        case MovementType::Lateral: {
            hand = left ? Hand::Left : Hand::Right;
            const double y = bd.rest_y + kLateralHeightFrac * ys;
            const double extent = left ? bd.lateral_left_x : bd.lateral_right_x;
            start = Vec3(cx, y, fz);
            end = Vec3(extent, y, fz);
            break;
        }
        case MovementType::Bilateral: {
            hand = Hand::Both;
            start = Vec3(cx - kBilateralBackFrac * xs, bd.rest_y + kBilateralLowFrac * ys, fz);
            end = Vec3(cx + kBilateralOutFrac * xs, bd.rest_y + kBilateralHighFrac * ys, fz);
            if (line_index % 2 == 1) std::swap(start, end);
            return;
        }
        case MovementType::Overhead: {
            hand = left ? Hand::Left : Hand::Right;
            const double x0 = cx - kOverheadXFrac * xs;
            const double x1 = cx + kOverheadXFrac * xs;
            start = Vec3(left ? x1 : x0, bd.rest_y + kOverheadLowFrac * ys, fz);
            end = Vec3(left ? x0 : x1, bd.rest_y + kOverheadHighFrac * ys, fz);
            break;
        }
    }
    if (reverse) std::swap(start, end);
}

void hold_target(MovementType type, const MovementBoundary& bd, int hold_index,
                 Hand& hand, Vec3& point) {
    const double xs = bd.x_span();
    const double ys = bd.y_span();
    const double cx = bd.x_center();
    const double fz = bd.forward_z;
    const bool left = hold_index % 2 == 0;

    switch (type) {
        case MovementType::Wrist:
            hand = left ? Hand::Left : Hand::Right;
            point = Vec3(cx + (left ? -1.0 : 1.0) * kWristHoldOffsetFrac * xs,
                         bd.rest_y + kWristHeightFrac * ys, fz);
            return;
        case MovementType::Lateral: {
            hand = left ? Hand::Left : Hand::Right;
            const double x = left ? bd.lateral_left_x + kLateralHoldInsetFrac * xs
                                  : bd.lateral_right_x - kLateralHoldInsetFrac * xs;
            point = Vec3(x, bd.rest_y + kLateralHeightFrac * ys, fz);
            return;
        }
        case MovementType::Bilateral:
        case MovementType::Overhead:
            hand = Hand::Both;
            point = Vec3(cx + kHoldApartFrac * xs, bd.rest_y + kHoldHeightFrac * ys, fz);
            return;
    }
    throw ValidationError("unknown movement type");
}

std::string json_vec3(const Vec3& v) {
    return "[" + format_double(v.x()) + "," + format_double(v.y()) + "," +
           format_double(v.z()) + "]";
}

}  // namespace

Vec3 MovementBoundary::mirror_x(const Vec3& p) const {
    return Vec3(2.0 * x_center() - p.x(), p.y(), p.z());
}

bool MovementBoundary::contains(const Vec3& p, double slack) const {
    return p.x() >= lateral_left_x - slack && p.x() <= lateral_right_x + slack &&
           p.y() >= rest_y - slack && p.y() <= overhead_y + slack &&
           std::abs(p.z() - forward_z) <= slack;
}

void MovementBoundary::validate() const {
    for (double v : {rest_y, overhead_y, lateral_left_x, lateral_right_x, forward_z}) {
        if (!std::isfinite(v)) throw ValidationError("movement boundary has non-finite values");
    }
    if (overhead_y <= rest_y)
        throw ValidationError("movement boundary: overhead height must exceed rest height");
    if (lateral_right_x <= lateral_left_x)
        throw ValidationError("movement boundary: right extent must exceed left extent");
}

MovementBoundary calibrate(const PoseSample& rest, const PoseSample& overhead,
                           const PoseSample& lateral) {
    auto hands = [](const PoseSample& s, const char* which) {
        const Vec3* lh = s.find(JointId::left_hand());
        const Vec3* rh = s.find(JointId::right_hand());
        if (lh == nullptr || rh == nullptr)
            throw ValidationError(std::string("calibration pose missing hand joints: ") + which);
        if (!finite(*lh) || !finite(*rh))
            throw ValidationError(std::string("calibration pose has non-finite hands: ") + which);
        return std::pair<Vec3, Vec3>(*lh, *rh);
    };
    auto [rl, rr] = hands(rest, "rest");
    auto [ol, orr] = hands(overhead, "overhead");
    auto [ll, lr] = hands(lateral, "lateral");

    MovementBoundary bd;
    bd.rest_y = 0.5 * (rl.y() + rr.y());
    bd.overhead_y = std::max(ol.y(), orr.y());
    bd.lateral_left_x = std::min(ll.x(), lr.x());
    bd.lateral_right_x = std::max(ll.x(), lr.x());
    bd.forward_z = (rl.z() + rr.z() + ol.z() + orr.z() + ll.z() + lr.z()) / 6.0;

    if (bd.overhead_y - bd.rest_y < 0.05 || bd.lateral_right_x - bd.lateral_left_x < 0.05)
        throw ValidationError("insufficient range: calibration poses span less than 5 cm");
    bd.validate();
    return bd;
}

std::string to_string(MovementType type) {
    switch (type) {
        case MovementType::Wrist: return "wrist";
        case MovementType::Lateral: return "lateral";
        case MovementType::Bilateral: return "bilateral";
        case MovementType::Overhead: return "overhead";
    }
    throw ValidationError("unknown movement type");
}

MovementType movement_type_from_string(const std::string& name) {
    if (name == "wrist") return MovementType::Wrist;
    if (name == "lateral") return MovementType::Lateral;
    if (name == "bilateral") return MovementType::Bilateral;
    if (name == "overhead") return MovementType::Overhead;
    throw ValidationError("unknown movement type: " + name);
}

std::string to_string(Hand hand) {
    switch (hand) {
        case Hand::Left: return "L";
        case Hand::Right: return "R";
        case Hand::Both: return "B";
    }
    throw ValidationError("unknown hand");
}

void LevelSpec::validate() const {
    if (id.empty()) throw ValidationError("level spec: empty id");
    if (!std::isfinite(bpm) || bpm <= 0.0) throw ValidationError("level spec: bpm must be positive");
    if (!std::isfinite(hold_min_s) || !std::isfinite(hold_max_s) || hold_min_s <= 0.0 ||
        hold_max_s < hold_min_s)
        throw ValidationError("level spec: bad hold range");
    // A zero duration is tolerated (it yields an empty schedule).
    if (!std::isfinite(duration_s) || duration_s < 0.0)
        throw ValidationError("level spec: negative duration");
}

LevelSpec LevelSpec::standard(const std::string& id) {
    LevelSpec spec;
    spec.id = id;
    spec.duration_s = 120.0;
    if (id == "L1") {
        spec.bpm = 77.0;
        spec.movement_type = MovementType::Wrist;
        spec.hold_min_s = 4.0;
        spec.hold_max_s = 6.0;
    } else if (id == "L2") {
        spec.bpm = 105.0;
        spec.movement_type = MovementType::Lateral;
        spec.hold_min_s = 6.0;
        spec.hold_max_s = 8.0;
    } else if (id == "L3") {
        spec.bpm = 112.0;
        spec.movement_type = MovementType::Bilateral;
        spec.hold_min_s = 8.0;
        spec.hold_max_s = 10.0;
    } else if (id == "L4") {
        spec.bpm = 140.0;
        spec.movement_type = MovementType::Overhead;
        spec.hold_min_s = 10.0;
        spec.hold_max_s = 12.0;
    } else {
        throw ValidationError("unknown level id: " + id);
    }
    return spec;
}

std::vector<LevelSpec> LevelSpec::standard_four() {
    return {standard("L1"), standard("L2"), standard("L3"), standard("L4")};
}

Vec3 TargetEvent::position_at(double t) const {
    const double span = deadline_t - appear_t;
    if (span <= 0.0) return path_start;
    const double u = std::clamp((t - appear_t) / span, 0.0, 1.0);
    return path_start + u * (path_end - path_start);
}

void TargetScript::validate(const MovementBoundary& boundary) const {
    level.validate();
    boundary.validate();
    const double b = level.beat_interval();
    auto aligned = [&](double t) { return std::abs(t - std::round(t / b) * b) <= 1e-9; };

    double prev_deadline = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const TargetEvent& ev = events[i];
        const std::string where = "target " + std::to_string(i);
        if (!finite(ev.path_start) || !finite(ev.path_end) || !std::isfinite(ev.appear_t) ||
            !std::isfinite(ev.deadline_t) || !std::isfinite(ev.hold_duration))
            throw ValidationError(where + ": non-finite fields");
        if (ev.deadline_t <= ev.appear_t)
            throw ValidationError(where + ": deadline not after appearance");
        if (ev.appear_t < prev_deadline - 1e-9)
            throw ValidationError(where + ": overlaps the previous target");
        if (!aligned(ev.appear_t) || !aligned(ev.deadline_t))
            throw ValidationError(where + ": not aligned to the beat grid");
        if (!boundary.contains(ev.path_start, 1e-9) || !boundary.contains(ev.path_end, 1e-9))
            throw ValidationError(where + ": path leaves the movement boundary");
        if (ev.kind == TargetKind::Hold) {
            if ((ev.path_end - ev.path_start).norm() > 1e-12)
                throw ValidationError(where + ": hold target with a moving path");
            if (ev.hold_duration < level.hold_min_s - 1e-9 ||
                ev.hold_duration > level.hold_max_s + 1e-9)
                throw ValidationError(where + ": hold duration outside the level's range");
            if (ev.deadline_t - ev.appear_t < ev.hold_duration - 1e-9)
                throw ValidationError(where + ": hold cannot fit before its deadline");
        } else if (ev.hold_duration != 0.0) {
            throw ValidationError(where + ": line target with a hold duration");
        }
        prev_deadline = ev.deadline_t;
    }
    if (prev_deadline > level.duration_s + 1e-9)
        throw ValidationError("script exceeds the level duration");
}

TargetScript build_level_schedule(const LevelSpec& spec, const MovementBoundary& boundary,
                                  std::uint64_t seed) {
    spec.validate();
    boundary.validate();

    TargetScript script;
    script.level = spec;

    const double b = spec.beat_interval();
    const long total_beats = static_cast<long>(std::floor(spec.duration_s / b + 1e-9));
    const auto n_hold_steps =
        static_cast<std::uint64_t>(std::floor(spec.hold_max_s - spec.hold_min_s + 1e-9)) + 1;
    const int group = lines_per_group(spec.movement_type);

    long k = 0;
    int line_i = 0;
    int hold_i = 0;
    int in_group = 0;
    while (k < total_beats) {
        const long remaining = total_beats - k;
        const double hold_d =
            spec.hold_min_s +
            static_cast<double>((seed + static_cast<std::uint64_t>(hold_i)) % n_hold_steps);
        const long hold_beats = 2 + static_cast<long>(std::ceil(hold_d / b - 1e-9));

        TargetEvent ev;
        if (in_group >= group && remaining >= hold_beats) {
            ev.kind = TargetKind::Hold;
            hold_target(spec.movement_type, boundary, hold_i, ev.hand, ev.path_start);
            ev.path_end = ev.path_start;
            ev.hold_duration = hold_d;
            ev.appear_t = static_cast<double>(k) * b;
            ev.deadline_t = static_cast<double>(k + hold_beats) * b;
            ++hold_i;
            in_group = 0;
            k += hold_beats;
        } else {
            ev.kind = TargetKind::Line;
            line_path(spec.movement_type, boundary, line_i, ev.hand, ev.path_start, ev.path_end);
            const long beats = remaining >= 2 ? 2 : 1;
            if (beats == 1) {
                const Vec3 mid = 0.5 * (ev.path_start + ev.path_end);
                ev.path_start = mid + kTailShrink * (ev.path_start - mid);
                ev.path_end = mid + kTailShrink * (ev.path_end - mid);
            }
            ev.appear_t = static_cast<double>(k) * b;
            ev.deadline_t = static_cast<double>(k + beats) * b;
            ++line_i;
            ++in_group;
            k += beats;
        }
        script.events.push_back(ev);
    }

    script.validate(boundary);
    return script;
}

std::string to_string(SessionEventKind kind) {
    switch (kind) {
        case SessionEventKind::Hit: return "hit";
        case SessionEventKind::Miss: return "miss";
        case SessionEventKind::HoldComplete: return "hold_complete";
        case SessionEventKind::HoldBroken: return "hold_broken";
        case SessionEventKind::Milestone25: return "milestone_25";
        case SessionEventKind::Milestone50: return "milestone_50";
        case SessionEventKind::Milestone75: return "milestone_75";
        case SessionEventKind::LevelComplete: return "level_complete";
    }
    throw ValidationError("unknown session event kind");
}

GameSession::GameSession(TargetScript script, MovementBoundary boundary, double capture_radius)
    : script_(std::move(script)), boundary_(boundary), capture_radius_(capture_radius) {
    script_.validate(boundary_);
    if (!std::isfinite(capture_radius_) || capture_radius_ <= 0.0)
        throw ValidationError("capture radius must be positive");
    states_.resize(script_.events.size());
}

bool GameSession::in_contact(const TargetEvent& event, const PoseSample& sample,
                             double t) const {
    const Vec3 target = event.position_at(t);
    auto near = [&](const JointId& id, const Vec3& pt) {
        const Vec3* p = sample.find(id);
        return p != nullptr && finite(*p) && (*p - pt).norm() <= capture_radius_;
    };
    switch (event.hand) {
        case Hand::Left: return near(JointId::left_hand(), target);
        case Hand::Right: return near(JointId::right_hand(), target);
        case Hand::Both:
            return near(JointId::right_hand(), target) &&
                   near(JointId::left_hand(), boundary_.mirror_x(target));
    }
    return false;
}

void GameSession::resolve(std::size_t index, bool success, double at,
                          std::vector<SessionEvent>& out) {
    TargetState& st = states_[index];
    st.resolved = true;
    st.succeeded = success;
    const TargetEvent& ev = script_.events[index];
    SessionEventKind kind;
    if (ev.kind == TargetKind::Line)
        kind = success ? SessionEventKind::Hit : SessionEventKind::Miss;
    else
        kind = success ? SessionEventKind::HoldComplete : SessionEventKind::HoldBroken;
    out.push_back({at, kind, static_cast<int>(index), to_string(ev.hand)});

    if (!success) return;
    ++hit_count_;
    const std::size_t total = script_.events.size();
    static constexpr SessionEventKind kMilestones[3] = {
        SessionEventKind::Milestone25, SessionEventKind::Milestone50,
        SessionEventKind::Milestone75};
    while (milestones_fired_ < 3 &&
           4 * hit_count_ >= static_cast<std::size_t>(milestones_fired_ + 1) * total) {
        out.push_back({at, kMilestones[milestones_fired_], -1, ""});
        ++milestones_fired_;
    }
}

void GameSession::resolve_due(double now, std::vector<SessionEvent>& out) {
    for (std::size_t i = 0; i < script_.events.size(); ++i) {
        if (states_[i].resolved) continue;
        const TargetEvent& ev = script_.events[i];
        if (ev.deadline_t <= now) resolve(i, false, ev.deadline_t, out);
    }
}

std::vector<SessionEvent> GameSession::step(const PoseSample& sample) {
    if (finished_) return {};
    const double t = sample.t;
    if (!std::isfinite(t)) throw ValidationError("non-finite sample time");
    if (t < last_t_) throw ValidationError("time regression at t=" + format_double(t));
    last_t_ = t;

    std::vector<SessionEvent> out;
    resolve_due(t, out);

    for (std::size_t i = 0; i < script_.events.size(); ++i) {
        TargetState& st = states_[i];
        if (st.resolved) continue;
        const TargetEvent& ev = script_.events[i];
        if (t < ev.appear_t || t >= ev.deadline_t) continue;
        const bool contact = in_contact(ev, sample, t);
        if (ev.kind == TargetKind::Line) {
            if (contact) resolve(i, true, t, out);
        } else if (contact) {
            if (!st.contact_since) st.contact_since = t;
            if (t - *st.contact_since >= ev.hold_duration - 1e-12) resolve(i, true, t, out);
        } else {
            st.contact_since.reset();
        }
    }

    if (t >= script_.level.duration_s) {
        resolve_due(std::numeric_limits<double>::infinity(), out);
        out.push_back({script_.level.duration_s, SessionEventKind::LevelComplete, -1, ""});
        finished_ = true;
    }

    events_.insert(events_.end(), out.begin(), out.end());
    return out;
}

std::vector<SessionEvent> GameSession::finish() {
    if (finished_) return {};
    std::vector<SessionEvent> out;
    resolve_due(std::numeric_limits<double>::infinity(), out);
    out.push_back({script_.level.duration_s, SessionEventKind::LevelComplete, -1, ""});
    finished_ = true;
    events_.insert(events_.end(), out.begin(), out.end());
    return out;
}

CompletionSummary summarize(const std::vector<SessionEvent>& events,
                            const TargetScript& script) {
    CompletionSummary summary;
    summary.level_id = script.level.id;
    summary.targets_total = script.events.size();
    for (const SessionEvent& ev : events) {
        if (ev.kind == SessionEventKind::Hit || ev.kind == SessionEventKind::HoldComplete)
            ++summary.targets_hit;
    }
    summary.completion_fraction =
        summary.targets_total == 0
            ? 0.0
            : static_cast<double>(summary.targets_hit) /
                  static_cast<double>(summary.targets_total);
    return summary;
}

void serialize_script(const TargetScript& script, std::ostream& out) {
    out << "{\"format\":\"mobility-script\",\"version\":1,\"level\":\"" << script.level.id
        << "\",\"bpm\":" << format_double(script.level.bpm) << ",\"movement_type\":\""
        << to_string(script.level.movement_type)
        << "\",\"hold_min_s\":" << format_double(script.level.hold_min_s)
        << ",\"hold_max_s\":" << format_double(script.level.hold_max_s)
        << ",\"duration_s\":" << format_double(script.level.duration_s) << "}\n";
    for (const TargetEvent& ev : script.events) {
        out << "{\"kind\":\"" << (ev.kind == TargetKind::Line ? "line" : "hold")
            << "\",\"hand\":\"" << to_string(ev.hand) << "\",\"start\":" << json_vec3(ev.path_start)
            << ",\"end\":" << json_vec3(ev.path_end)
            << ",\"appear_t\":" << format_double(ev.appear_t)
            << ",\"deadline_t\":" << format_double(ev.deadline_t);
        if (ev.kind == TargetKind::Hold)
            out << ",\"hold_duration\":" << format_double(ev.hold_duration);
        out << "}\n";
    }
}

void serialize_events(const std::vector<SessionEvent>& events, std::ostream& out) {
    for (const SessionEvent& ev : events) {
        out << "{\"t\":" << format_double(ev.t) << ",\"kind\":\"" << to_string(ev.kind) << "\"";
        if (ev.target_index >= 0) out << ",\"target\":" << ev.target_index;
        if (!ev.detail.empty()) out << ",\"detail\":\"" << ev.detail << "\"";
        out << "}\n";
    }
}

}  // namespace mobility
