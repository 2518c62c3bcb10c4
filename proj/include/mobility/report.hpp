#pragma once

#include "mobility/game.hpp"
#include "mobility/kinematics.hpp"
#include "mobility/pose_log.hpp"
#include "mobility/tracking.hpp"
#include "mobility/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mobility {

inline constexpr const char* kToolName = "mobility-kit";
inline constexpr const char* kToolVersion = "1.0.0";

/// Optional bedside measurements, one row per measure (e.g. HR, SpO2, SBP,
/// DBP): a baseline column followed by one column per level. CSV header is
/// `measure,baseline,<level>,...`; level labels are taken from the header.
struct PhysioTable {
    struct Row {
        std::string measure;
        double baseline = 0.0;
        std::vector<double> values;  // one per level column
    };
    std::vector<std::string> levels;
    std::vector<Row> rows;
};

PhysioTable parse_physio_csv(const std::string& text);
PhysioTable load_physio_csv(const std::string& path);

/// Percent change from baseline per measure and level.
struct PhysioChange {
    struct Row {
        std::string measure;
        std::vector<double> change_pct;
    };
    std::vector<std::string> levels;
    std::vector<Row> rows;
};

PhysioChange percent_change_table(const PhysioTable& physio);

/// CSV `measure,<level>,...` with percent-change cells.
std::string physio_change_csv(const PhysioChange& change);

/// Everything a session report is derived from. The pose stream is replayed
/// against charts rebuilt from (specs, boundary, seed) — the same derivation
/// the population generator uses — so a report over generated data reflects
/// the charts that produced it.
struct ReportInputs {
    PoseLog pose_log;
    LevelSegmentation segmentation;
    std::vector<LevelSpec> specs;  // configured level progression
    MovementBoundary boundary;
    std::uint64_t seed = 0;
    double capture_radius = 0.10;  // meters
    std::optional<PoseLog> reference;
    RegisterMode mode = RegisterMode::none;
    double assoc_tol = 0.010;  // seconds
    std::optional<PhysioTable> physio;
};

struct SessionReport {
    std::string session_id;   // derived from the config hash
    std::string config_hash;  // 16 hex digits over canonical input forms
    std::string tool_version;
    std::vector<CompletionSummary> completion;  // windows matching a configured level
    MetricsTable metrics;                       // every window, all core joints
    std::optional<ApeReport> tracking;          // when a reference stream is given
    std::optional<PhysioChange> physio_change;  // when bedside values are given
};

/// FNV-1a over the canonical serializations of every input, so the hash
/// identifies the data itself rather than incidental file formatting.
std::uint64_t config_hash(const ReportInputs& inputs);

SessionReport build_session_report(const ReportInputs& inputs);

/// Deterministic JSON bytes: identical reports serialize identically.
std::string report_json(const SessionReport& report);

/// CSV `level,targets_total,targets_hit,completion_fraction`.
std::string completion_csv(const std::vector<CompletionSummary>& completion);

}  // namespace mobility
