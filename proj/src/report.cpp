#include "mobility/report.hpp"

#include "mobility/config.hpp"
#include "mobility/format.hpp"
#include "mobility/stats.hpp"
#include "mobility/synthgen.hpp"
#include "mobility/trajectory.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

namespace mobility {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(trim(line.substr(start)));
            return fields;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

double parse_cell(const std::string& value, const std::string& where) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        if (!std::isfinite(v)) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("physiological CSV: bad value in " + where + ": " + value);
    }
}

std::string physio_csv(const PhysioTable& physio) {
    std::string out = "measure,baseline";
    for (const std::string& level : physio.levels) out += "," + level;
    out += "\n";
    for (const PhysioTable::Row& row : physio.rows) {
        out += row.measure + "," + format_double(row.baseline);
        for (double v : row.values) out += "," + format_double(v);
        out += "\n";
    }
    return out;
}

std::uint64_t fnv1a64(std::uint64_t h, const std::string& bytes) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex16(std::uint64_t h) {
    static const char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

}  // namespace

PhysioTable parse_physio_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("physiological CSV: empty file");
    std::vector<std::string> header = split_csv(trim(line));
    if (header.size() < 3 || header[0] != "measure" || header[1] != "baseline")
        throw ValidationError("physiological CSV: header must be measure,baseline,<level>,...");

    PhysioTable table;
    table.levels.assign(header.begin() + 2, header.end());
    for (const std::string& level : table.levels)
        if (level.empty()) throw ValidationError("physiological CSV: empty level label");

    while (std::getline(in, line)) {
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        std::vector<std::string> fields = split_csv(stripped);
        if (fields.size() != header.size())
            throw ValidationError("physiological CSV: row for " +
                                  (fields.empty() ? std::string("?") : fields[0]) +
                                  " has the wrong column count");
        PhysioTable::Row row;
        row.measure = fields[0];
        if (row.measure.empty()) throw ValidationError("physiological CSV: empty measure name");
        for (const PhysioTable::Row& prev : table.rows)
            if (prev.measure == row.measure)
                throw ValidationError("physiological CSV: duplicate measure: " + row.measure);
        row.baseline = parse_cell(fields[1], row.measure + " baseline");
        for (std::size_t i = 2; i < fields.size(); ++i)
            row.values.push_back(parse_cell(fields[i], row.measure + " " + header[i]));
        table.rows.push_back(std::move(row));
    }
    if (table.rows.empty()) throw ValidationError("physiological CSV: no measure rows");
    return table;
}

PhysioTable load_physio_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open physiological CSV: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_physio_csv(buf.str());
}

PhysioChange percent_change_table(const PhysioTable& physio) {
    PhysioChange change;
    change.levels = physio.levels;
    for (const PhysioTable::Row& row : physio.rows) {
        PhysioChange::Row out;
        out.measure = row.measure;
        for (double v : row.values) out.change_pct.push_back(percent_change(row.baseline, v));
        change.rows.push_back(std::move(out));
    }
    return change;
}

std::string physio_change_csv(const PhysioChange& change) {
    std::string out = "measure";
    for (const std::string& level : change.levels) out += "," + level;
    out += "\n";
    for (const PhysioChange::Row& row : change.rows) {
        out += row.measure;
        for (double v : row.change_pct) out += "," + format_double(v);
        out += "\n";
    }
    return out;
}

std::uint64_t config_hash(const ReportInputs& inputs) {
    std::uint64_t h = 14695981039346656037ULL;
    auto section = [&h](const std::string& role, const std::string& payload) {
        h = fnv1a64(h, role);
        h = fnv1a64(h, std::string(1, '\0'));
        h = fnv1a64(h, payload);
        h = fnv1a64(h, std::string(1, '\0'));
    };

    section("tool", std::string(kToolName) + "/" + kToolVersion);
    {
        std::ostringstream log;
        serialize_pose_log(inputs.pose_log, log);
        section("pose-log", log.str());
    }
    section("segments", segmentation_csv(inputs.segmentation));
    {
        std::string levels;
        for (const LevelSpec& spec : inputs.specs) {
            levels += spec.id + "," + format_double(spec.bpm) + "," +
                      to_string(spec.movement_type) + "," + format_double(spec.hold_min_s) + "," +
                      format_double(spec.hold_max_s) + "," + format_double(spec.duration_s) + "\n";
        }
        section("levels", levels);
    }
    section("boundary", boundary_text(inputs.boundary));
    section("seed", std::to_string(inputs.seed));
    section("capture-radius", format_double(inputs.capture_radius));
    if (inputs.reference) {
        std::ostringstream ref;
        serialize_pose_log(*inputs.reference, ref);
        section("reference", ref.str());
        section("mode", to_string(inputs.mode));
        section("assoc-tol", format_double(inputs.assoc_tol));
    }
    if (inputs.physio) section("physio", physio_csv(*inputs.physio));
    return h;
}

SessionReport build_session_report(const ReportInputs& inputs) {
    inputs.segmentation.validate();
    for (const LevelSpec& spec : inputs.specs) spec.validate();
    inputs.boundary.validate();

    SessionReport report;
    report.tool_version = kToolVersion;
    report.config_hash = hex16(config_hash(inputs));
    report.session_id = "sess-" + report.config_hash.substr(0, 12);

    const std::vector<TargetScript> charts =
        population_charts(inputs.specs, inputs.boundary, inputs.seed);
    for (const LevelWindow& window : inputs.segmentation.windows) {
        std::size_t idx = inputs.specs.size();
        for (std::size_t j = 0; j < inputs.specs.size(); ++j)
            if (inputs.specs[j].id == window.label) idx = j;
        if (idx == inputs.specs.size()) continue;  // free-form window: metrics only

        GameSession session(charts[idx], inputs.boundary, inputs.capture_radius);
        for (const PoseSample& sample : inputs.pose_log.samples) {
            if (sample.t < window.start_t || sample.t >= window.end_t) continue;
            PoseSample local = sample;
            local.t = sample.t - window.start_t;
            session.step(local);
        }
        session.finish();
        report.completion.push_back(summarize(session.events(), charts[idx]));
    }

    report.metrics = level_metrics(inputs.pose_log.samples, inputs.segmentation, JointId::core());

    if (inputs.reference) {
        report.tracking = ape_report(inputs.pose_log.samples, inputs.reference->samples,
                                     inputs.segmentation, JointId::core(), inputs.mode,
                                     inputs.assoc_tol);
    }
    if (inputs.physio) report.physio_change = percent_change_table(*inputs.physio);
    return report;
}

std::string report_json(const SessionReport& report) {
    nlohmann::ordered_json j;
    j["tool"] = {{"name", kToolName}, {"version", report.tool_version}};
    j["session"] = {{"id", report.session_id}, {"config_hash", report.config_hash}};

    j["completion"] = nlohmann::ordered_json::array();
    for (const CompletionSummary& c : report.completion) {
        j["completion"].push_back({{"level", c.level_id},
                                   {"targets_total", c.targets_total},
                                   {"targets_hit", c.targets_hit},
                                   {"completion_fraction", c.completion_fraction}});
    }

    j["metrics"] = nlohmann::ordered_json::array();
    for (const MetricCell& c : report.metrics.cells) {
        nlohmann::ordered_json cell;
        cell["level"] = c.level;
        cell["joint"] = c.joint.code();
        cell["mean_speed_mps"] = c.mean_speed ? nlohmann::ordered_json(*c.mean_speed)
                                              : nlohmann::ordered_json(nullptr);
        cell["rom_m"] = c.rom ? nlohmann::ordered_json(*c.rom) : nlohmann::ordered_json(nullptr);
        cell["volume_m3"] =
            c.volume ? nlohmann::ordered_json(*c.volume) : nlohmann::ordered_json(nullptr);
        cell["degenerate_volume"] = c.degenerate_volume;
        if (!c.error.empty()) cell["error"] = c.error;
        j["metrics"].push_back(std::move(cell));
    }

    if (report.tracking) {
        j["tracking"] = nlohmann::ordered_json::array();
        for (const ApeCell& c : report.tracking->cells) {
            nlohmann::ordered_json cell;
            cell["task"] = c.task;
            cell["joint"] = c.joint.code();
            if (c.stats) {
                cell["mean_m"] = c.stats->mean;
                cell["sd_m"] = c.stats->sd;
                cell["rmse_m"] = c.stats->rmse;
                cell["max_m"] = c.stats->max;
                cell["n"] = c.stats->n;
            }
            if (!c.error.empty()) cell["error"] = c.error;
            j["tracking"].push_back(std::move(cell));
        }
    }

    if (report.physio_change) {
        nlohmann::ordered_json physio;
        physio["levels"] = report.physio_change->levels;
        physio["rows"] = nlohmann::ordered_json::array();
        for (const PhysioChange::Row& row : report.physio_change->rows) {
            physio["rows"].push_back({{"measure", row.measure}, {"change_pct", row.change_pct}});
        }
        j["physiological_percent_change"] = std::move(physio);
    }

    return j.dump(2) + "\n";
}

std::string completion_csv(const std::vector<CompletionSummary>& completion) {
    std::string out = "level,targets_total,targets_hit,completion_fraction\n";
    for (const CompletionSummary& c : completion) {
        out += c.level_id + "," + std::to_string(c.targets_total) + "," +
               std::to_string(c.targets_hit) + "," + format_double(c.completion_fraction) + "\n";
    }
    return out;
}

}  // namespace mobility
