#pragma once

#include "mobility/game.hpp"
#include "mobility/kinematics.hpp"
#include "mobility/pose_log.hpp"
#include "mobility/stats.hpp"
#include "mobility/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mobility {

/// Knobs abstracting how impaired a simulated player is. amplitude_scale
/// shrinks motion toward the boundary center (0 pins the hands there),
/// speed_scale caps hand velocity as a fraction of the 2.5 m/s nominal
/// maximum, tremor_sd adds 4 Hz low-passed Gaussian jitter, and
/// reaction_delay lags the target tracking.
struct PatientProfile {
    std::string name = "custom";
    double amplitude_scale = 1.0;  // [0, 1]
    double speed_scale = 1.0;      // (0, 1]
    double tremor_sd = 0.0;        // meters
    double reaction_delay = 0.0;   // seconds
    std::uint64_t seed = 0;

    void validate() const;

    /// Ideal player: full amplitude and speed, no tremor, no lag.
    static PatientProfile perfect();
    /// Documented default for an unimpaired adult; seed distinguishes
    /// individuals.
    static PatientProfile healthy(std::uint64_t seed);
};

/// `n` mildly heterogeneous unimpaired players with deterministic
/// parameter jitter derived from `seed`.
std::vector<PatientProfile> healthy_population(std::size_t n, std::uint64_t seed);

/// Key-value profile text: `key = value` lines, `#` comments. Keys:
/// name, amplitude_scale, speed_scale, tremor_sd, reaction_delay, seed;
/// missing keys keep the PatientProfile defaults, unknown keys are errors.
PatientProfile parse_profile_text(const std::string& text);
PatientProfile load_profile(const std::string& path);
std::string profile_text(const PatientProfile& profile);

/// The reference playable region used when no per-patient calibration is
/// available: a seated adult's reach in the headset frame.
MovementBoundary default_boundary();

/// 64-bit FNV-1a over the serialized script, identifying the chart a stream
/// was produced against.
std::uint64_t script_hash(const TargetScript& script);

struct SyntheticStream {
    std::vector<PoseSample> samples;  // 50 Hz, t = 0 .. level duration
    PatientProfile profile;
    LevelSpec level;
    std::uint64_t chart_hash = 0;

    PoseLog to_pose_log() const;
};

/// Simulates a player working the script: hands chase each target's current
/// path point (left hand on the mirrored point for Both targets) under the
/// profile's amplitude/speed/tremor/lag model, and idle hands drift back to
/// per-side rest points pulled slightly toward the body. Elbows close a
/// two-segment arm (upper arm 0.30 m, forearm 0.28 m) against fixed
/// shoulder anchors. Deterministic in (profile, script, boundary).
SyntheticStream generate(const PatientProfile& profile, const TargetScript& script,
                         const MovementBoundary& boundary);

struct PopulationEntry {
    std::size_t profile_index = 0;
    std::string level_id;
    SyntheticStream stream;
    MetricsTable metrics;  // all six core joints over the level window
};

struct Population {
    std::vector<PatientProfile> profiles;
    std::vector<PopulationEntry> entries;  // profile-major, then level

    /// "subject,level,joint,mean_speed_mps,rom_m,volume_m3,flags" rows.
    std::string metrics_csv() const;

    /// Hand rows (LH/RH averaged) of one metric pivoted subject x level,
    /// ready for rm_anova/friedman. metric is "speed", "rom", or "volume".
    RepeatedMeasures hand_table(const std::string& metric) const;
};

/// The charts a population plays: one per spec, seeded by index from `seed`.
/// Corpus generation and later replays must agree on this derivation, so it
/// is the single source of truth for it.
std::vector<TargetScript> population_charts(const std::vector<LevelSpec>& specs,
                                            const MovementBoundary& boundary,
                                            std::uint64_t seed);

/// Runs every profile through every level. Each level's chart is built once
/// from `seed` (all subjects play the same charts); per-stream randomness
/// comes from the profile seeds.
Population generate_population(const std::vector<PatientProfile>& profiles,
                               const std::vector<LevelSpec>& specs,
                               const MovementBoundary& boundary, std::uint64_t seed);

}  // namespace mobility
