#include "mobility/pose_log.hpp"

#include "mobility/format.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mobility {

namespace {

using nlohmann::json;

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
    throw ValidationError(what + " at line " + std::to_string(line));
}

void parse_header(const std::string& text, std::size_t line_no, PoseLogHeader& header) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail_line(line_no, std::string("malformed header: ") + e.what());
    }
    if (!j.is_object() || j.value("format", "") != "mobility-pose") {
        fail_line(line_no, "missing mobility-pose header");
    }
    header.version = j.value("version", 0);
    if (header.version != 1) {
        fail_line(line_no, "unsupported pose log version " + std::to_string(header.version));
    }
    header.rate_hz = j.value("rate_hz", 50.0);
    if (!(header.rate_hz > 0.0) || !std::isfinite(header.rate_hz)) {
        fail_line(line_no, "invalid rate_hz");
    }
    header.source = j.value("source", "");
}

PoseSample parse_record(const std::string& text, std::size_t line_no) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        // JSON has no NaN/Inf literals, so a bare NaN coordinate lands here.
        std::string lowered = text;
        std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (lowered.find("nan") != std::string::npos || lowered.find("inf") != std::string::npos) {
            fail_line(line_no, "invalid coordinate");
        }
        fail_line(line_no, std::string("malformed record: ") + e.what());
    }
    if (!j.is_object() || !j.contains("t") || !j.contains("joints") || !j["joints"].is_object()) {
        fail_line(line_no, "malformed record: expected {\"t\":..., \"joints\":{...}}");
    }
    PoseSample sample;
    if (!j["t"].is_number()) fail_line(line_no, "malformed record: t must be a number");
    sample.t = j["t"].get<double>();
    if (!std::isfinite(sample.t)) fail_line(line_no, "invalid coordinate");
    if (sample.t < 0.0) fail_line(line_no, "negative timestamp");
    for (const auto& [code, arr] : j["joints"].items()) {
        if (!arr.is_array() || arr.size() != 3) {
            fail_line(line_no, "malformed record: joint " + code + " is not a 3-vector");
        }
        Vec3 p;
        for (int k = 0; k < 3; ++k) {
            if (!arr[k].is_number()) fail_line(line_no, "invalid coordinate");
            p[k] = arr[k].get<double>();
            if (!std::isfinite(p[k])) fail_line(line_no, "invalid coordinate");
        }
        sample.joints.emplace(JointId(code), p);
    }
    return sample;
}

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

PoseLog parse_pose_log(std::istream& in) {
    PoseLog log;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    std::size_t prev_sample_line = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        if (!saw_header) {
            parse_header(line, line_no, log.header);
            saw_header = true;
            continue;
        }
        PoseSample sample = parse_record(line, line_no);
        if (!log.samples.empty() && sample.t <= log.samples.back().t) {
            throw ValidationError("time regression at line " + std::to_string(line_no) +
                                  " (t=" + format_double(sample.t) + " after t=" +
                                  format_double(log.samples.back().t) + " at line " +
                                  std::to_string(prev_sample_line) + ")");
        }
        prev_sample_line = line_no;
        log.samples.push_back(std::move(sample));
    }
    if (!saw_header) throw ValidationError("no samples");
    if (log.samples.empty()) throw ValidationError("no samples");
    return log;
}

PoseLog load_pose_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open pose log: " + path);
    return parse_pose_log(in);
}

void serialize_pose_log(const PoseLog& log, std::ostream& out) {
    out << "{\"format\":\"mobility-pose\",\"version\":" << log.header.version
        << ",\"rate_hz\":" << format_double(log.header.rate_hz);
    if (!log.header.source.empty()) out << ",\"source\":\"" << log.header.source << "\"";
    out << "}\n";

    auto write_joint = [&out](const JointId& id, const Vec3& p, bool first) {
        if (!first) out << ",";
        out << "\"" << id.code() << "\":[" << format_double(p.x()) << ","
            << format_double(p.y()) << "," << format_double(p.z()) << "]";
    };
    for (const auto& s : log.samples) {
        out << "{\"t\":" << format_double(s.t) << ",\"joints\":{";
        bool first = true;
        for (const auto& id : JointId::core()) {
            if (const Vec3* p = s.find(id)) {
                write_joint(id, *p, first);
                first = false;
            }
        }
        // std::map keeps extension codes sorted.
        for (const auto& [id, p] : s.joints) {
            if (id.is_core()) continue;
            write_joint(id, p, first);
            first = false;
        }
        out << "}}\n";
    }
}

void save_pose_log(const PoseLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write pose log: " + path);
    serialize_pose_log(log, out);
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace mobility
