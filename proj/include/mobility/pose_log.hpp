#pragma once

#include "mobility/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace mobility {

// Pose logs are UTF-8 line-delimited JSON. The first line is a header:
//   {"format":"mobility-pose","version":1,"rate_hz":50}
// optionally carrying "source":"reference" for ground-truth logs. Every
// following line is one sample:
//   {"t":<seconds>,"joints":{"LH":[x,y,z],"RH":[...],...}}
// Coordinates are meters. Unknown joint codes are preserved verbatim.

struct PoseLogHeader {
    int version = 1;
    double rate_hz = 50.0;
    std::string source;  // empty or "reference"
};

struct PoseLog {
    PoseLogHeader header;
    std::vector<PoseSample> samples;
};

/// Parses a pose log. Throws ValidationError with the offending line number
/// for malformed records, time regressions, and non-finite coordinates, and
/// "no samples" when the stream holds no sample records.
PoseLog parse_pose_log(std::istream& in);

/// parse_pose_log over a file; throws IoError when the file cannot be read.
PoseLog load_pose_log(const std::string& path);

/// Deterministic serialization: core joints first in canonical order, then
/// extension joints sorted by code; numbers in shortest round-trip form.
void serialize_pose_log(const PoseLog& log, std::ostream& out);

void save_pose_log(const PoseLog& log, const std::string& path);

}  // namespace mobility
